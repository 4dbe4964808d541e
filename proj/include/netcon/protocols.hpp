// Copyright 2026 The netcon Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

// The protocol catalog. Tables are kept as rule text so they can be dumped,
// diffed and reloaded. A "# derived" comment marks rules that are not part
// of a base transition table and were filled in from the prose rules.

#include <cmath>
#include <functional>
#include <map>

#include "netcon/model.hpp"

namespace netcon {

namespace fixtures {

// Leader walks the line left to right after every expansion, deactivating
// chords to the new right endpoint. The t-/tf-/tr-/t'-/tf'- variants carry
// a "degree sequence already wrong" flag for termination detection: each
// node's degree is checked when the walk leaves it (after its edge to the
// right endpoint is resolved). A clean walk ends in a halting wave w/h.
inline constexpr std::string_view online_cycle_elimination = R"(%name online-cycle-elimination
%states l0 q0 e l1 i' lc' te lc tf i l t tr p' tf' t' p'' p t- tr- t'- tf- tf'- w h
%initial q0
%leader l0
%output *
%halt h
l0 q0 1 -> e l1 1
l1 q0 * -> i' lc' 1
e lc' * -> te lc 0
te i' 1 [degU=1] -> e tf 1
te i' 1 [degU!=1] -> e tf- 1      # derived
tf lc 1 [degU!=2] -> i l 1
tf lc 1 [degU=2,degV!=1] -> i l 1   # derived
tf lc 1 [degU=2,degV=1] -> w h 1    # derived
tf- lc 1 -> i l 1                   # derived
te i 1 [degU=1] -> e t 1
te i 1 [degU!=1] -> e t- 1        # derived
t lc * -> tr lc 0
t- lc * -> tr- lc 0               # derived
tr i 1 [degU=2] -> p' t' 1
tr i 1 [degU!=2] -> p' t'- 1      # derived
tr- i 1 -> p' t'- 1               # derived
tr i' 1 [degU=2] -> p' tf' 1
tr i' 1 [degU!=2] -> p' tf'- 1    # derived
tr- i' 1 -> p' tf'- 1             # derived
e p' 1 -> e p'' 1
p p' 1 -> i p'' 1
p'' t' 1 -> p t 1
p'' t'- 1 -> p t- 1               # derived
p'' tf' 1 -> i tf 1
p'' tf'- 1 -> i tf- 1             # derived
l q0 * -> i' lc' 1
e l1 1 [degU=1,degV=1] -> h h 1   # derived: n = 2
i w 1 -> w h 1                    # derived
e w 1 -> h h 1                    # derived
)";

// Center l attracts q0 into a star; p' marks a peripheral that may still
// have edges to other peripherals. The line grows from the center e_l over
// p's, with l'1 / i' for its second node (never disconnected from the
// center). Internal nodes halt once cut off from the center; the center
// halts once its degree is 1 and i' then halts the far endpoint.
inline constexpr std::string_view line_around_a_star = R"(%name line-around-a-star
%states l q0 p' p e_l l'1 l' i' i w h
%initial q0
%leader l
%output *
%halt h
l q0 1 [degV=1] -> l p 1        # derived
l q0 1 [degV!=1] -> l p' 1      # derived
l q0 0 -> l p' 1                # derived
e_l q0 1 [degV=1] -> e_l p 1    # derived
e_l q0 1 [degV!=1] -> e_l p' 1  # derived
e_l q0 0 -> e_l p' 1            # derived
p' p' 1 -> p' p' 0              # derived
l p' 1 [degV=1] -> l p 1        # derived
e_l p' 1 [degV=1] -> e_l p 1    # derived
l p 1 -> e_l l'1 1              # derived
l'1 p 0 -> i' l' 1              # derived
l' p 0 [degU!=1] -> i l' 1      # derived
l' p 0 [degU=1] -> h l' 1       # derived
e_l i 1 -> e_l h 0              # derived
e_l l' 1 -> e_l l' 0            # derived
e_l l'1 1 [degU=1] -> h h 1     # derived: n = 2
e_l i' 1 [degU=1] -> h w 1      # derived
w l' 0 -> h h 0                 # derived
w l' 1 -> h h 1                 # derived
)";

// Directed. State names carry the output bit as their last character.
inline constexpr std::string_view stable_2cycle_detection = R"(%name stable-2-cycle-detection
%states l0 l1 l'0 l'1 f0 f1 f'0 f'1
%initial l0
%output *
%directed
l0 l0 * -> l0 f0 *
l0 l1 * -> l0 f0 *
l1 l0 * -> l0 f0 *
l1 l1 * -> l0 f0 *
l0 f0 1 -> f'0 l'0 *
l0 f1 1 -> f'0 l'0 *
f0 l0 1 -> l0 f0 *
f1 l0 1 -> l0 f0 *
l'0 f'0 1 -> l1 f1 *
l0 f0 0 -> l0 f0 *
l0 f1 0 -> l0 f0 *
l1 f0 0 -> l1 f1 *
l1 f1 0 -> l1 f1 *
f0 l0 0 -> f0 l0 *
f1 l0 0 -> f0 l0 *
f0 l1 0 -> f1 l1 *
f1 l1 0 -> f1 l1 *
l1 f0 1 -> l1 f1 *
f0 l1 1 -> f1 l1 *
f'0 l'0 1 -> f0 l0 *
l'0 f'0 0 -> l0 f0 *
f'0 l'0 0 -> f0 l0 *
)";

inline constexpr std::string_view star_transformer = R"(%name star-transformer
%states l p
%initial l
%output *
l l * -> l p 1
l p 0 -> l p 1
p p 1 [cnd=1] -> p p 0
)";

// p1 is a peripheral of degree 1. A star center that sees one of its own p1
// starts a line (e_l center, l'1 / l' right endpoint, i1 / i internals).
// Losing endpoints become f / f1 and backtrack their line to peripherals.
// A spanning ring is detected at the (e_l, l') pair; wl/z/w form the halting
// wave and hl marks the left end of the final line.
inline constexpr std::string_view line_transformer = R"(%name line-transformer
%states l p p1 e_l l'1 l' i1 i f f1 wl z w h hl
%initial l
%output *
%halt h hl
l l 0 -> l p 1
l l 1 [degV=1] -> l p1 1
l l 1 [degV!=1] -> l p 1
l p 0 -> l p 1
l p1 0 -> l p 1
e_l p 0 -> e_l p 1
e_l p1 0 -> e_l p 1
p p 1 [cnd=1,degU=2,degV=2] -> p1 p1 0
p p 1 [cnd=1,degU=2,degV!=2] -> p1 p 0
p p 1 [cnd=1,degU!=2,degV!=2] -> p p 0
l p1 1 -> e_l l'1 1
l'1 p1 0 [cnd=1,degU=1] -> i1 l' 1
l' p1 0 [cnd=1,degU=2] -> i l' 1
e_l i 1 -> e_l i 0
l' p 1 [cnd=1,degV=2] -> l' p1 0     # derived
l' p 1 [cnd=1,degV!=2] -> l' p 0     # derived
l'1 p 1 [cnd=1,degV=2] -> l'1 p1 0   # derived
l'1 p 1 [cnd=1,degV!=2] -> l'1 p 0   # derived
l' l 0 -> l' p 1
l' l 1 [degV=1] -> l' p1 1
l' l 1 [degV!=1] -> l' p 1
l'1 l 0 -> l'1 p 1
l'1 l 1 [degV=1] -> l'1 p1 1
l'1 l 1 [degV!=1] -> l'1 p 1
l' l' * -> l' f *
l' l'1 * -> l' f1 *
l'1 l'1 * -> l'1 f1 *
i f 1 [degV=1] -> f p1 1
i f 1 [degV!=1] -> f p 1
i1 f 1 [degV=1] -> f1 p1 1
i1 f 1 [degV!=1] -> f1 p 1
e_l f1 1 [degU=1,degV=1] -> p1 p1 1
e_l f1 1 [degU=1,degV!=1] -> p1 p 1
e_l f1 1 [degU!=1,degV=1] -> p p1 1
e_l f1 1 [degU!=1,degV!=1] -> p p 1
e_l l' 1 [degU=2,degV=2] -> wl z 0
e_l l'1 1 [degU=1,degV=1] -> hl h 1  # derived: n = 2
wl i1 1 -> hl w 1                    # derived
w i 1 -> h w 1                       # derived
w z 1 -> h h 1                       # derived
)";

// Not a published protocol: identical nodes mark each other over an active
// edge, then drop an edge whose endpoints are both marked. Used to exercise
// the mimic-schedule replay.
inline constexpr std::string_view cycle_breaker_strawman = R"(%name cycle-breaker-strawman
%states q0 m d
%initial q0
%output *
q0 q0 1 -> m m 1
m m 1 -> d d 0
)";

}  // namespace fixtures

enum class Target { spanning_line, spanning_star, two_cycle_predicate, none };
enum class ClaimedTime { n4, n2_log_n, n3, stabilizing };

inline const char* to_string(Target t) {
  switch (t) {
    case Target::spanning_line: return "spanning_line";
    case Target::spanning_star: return "spanning_star";
    case Target::two_cycle_predicate: return "2cycle_predicate";
    case Target::none: return "none";
  }
  return "?";
}

inline const char* to_string(ClaimedTime c) {
  switch (c) {
    case ClaimedTime::n4: return "n^4";
    case ClaimedTime::n2_log_n: return "n^2 log n";
    case ClaimedTime::n3: return "n^3";
    case ClaimedTime::stabilizing: return "stabilizing";
  }
  return "?";
}

/// The claimed running-time shape f(n) used for normalized constants.
inline double claimed_time_value(ClaimedTime c, std::size_t n) {
  const auto x = static_cast<double>(n);
  switch (c) {
    case ClaimedTime::n4: return x * x * x * x;
    case ClaimedTime::n2_log_n: return x * x * std::log(x);
    case ClaimedTime::n3: return x * x * x;
    case ClaimedTime::stabilizing: return 1.0;
  }
  return 1.0;
}

struct ProtocolCatalogEntry {
  ProtocolSpec spec;
  bool requires_leader = false;
  Target target = Target::none;
  ClaimedTime claimed_time = ClaimedTime::stabilizing;
  bool preserves_connectivity = false;
  bool terminating = false;

  const std::string& name() const { return spec.name(); }

  /// Default step budget: 50 n^4 for the n^4 protocol, 50 n^3 otherwise.
  std::uint64_t default_budget(std::size_t n) const {
    const auto x = static_cast<std::uint64_t>(n);
    return claimed_time == ClaimedTime::n4 ? 50 * x * x * x * x : 50 * x * x * x;
  }
};

inline ProtocolCatalogEntry online_cycle_elimination() {
  return {ProtocolSpec::parse(fixtures::online_cycle_elimination), true, Target::spanning_line, ClaimedTime::n4, true,
          true};
}

inline ProtocolCatalogEntry line_around_a_star() {
  return {ProtocolSpec::parse(fixtures::line_around_a_star), true, Target::spanning_line, ClaimedTime::n2_log_n, true,
          true};
}

inline ProtocolCatalogEntry stable_2cycle_detection() {
  return {ProtocolSpec::parse(fixtures::stable_2cycle_detection), false, Target::two_cycle_predicate,
          ClaimedTime::stabilizing, false, false};
}

inline ProtocolCatalogEntry star_transformer() {
  return {ProtocolSpec::parse(fixtures::star_transformer), false, Target::spanning_star, ClaimedTime::stabilizing,
          true, false};
}

inline ProtocolCatalogEntry line_transformer() {
  return {ProtocolSpec::parse(fixtures::line_transformer), false, Target::spanning_line, ClaimedTime::n3, true, true};
}

inline ProtocolCatalogEntry cycle_breaker_strawman() {
  return {ProtocolSpec::parse(fixtures::cycle_breaker_strawman), false, Target::none, ClaimedTime::stabilizing, false,
          false};
}

/// Output bit of a Stable-2-Cycle-Detection state (its trailing digit).
inline int decision_bit(const ProtocolSpec& proto, StateId s) {
  const auto& name = proto.state_name(s);
  return name.empty() || name.back() != '1' ? 0 : 1;
}

inline const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names{"online-cycle-elimination", "line-around-a-star",
                                              "stable-2-cycle-detection", "star-transformer", "line-transformer",
                                              "cycle-breaker-strawman"};
  return names;
}

inline ProtocolCatalogEntry catalog_entry(std::string_view name) {
  if (name == "online-cycle-elimination") return online_cycle_elimination();
  if (name == "line-around-a-star") return line_around_a_star();
  if (name == "stable-2-cycle-detection") return stable_2cycle_detection();
  if (name == "star-transformer") return star_transformer();
  if (name == "line-transformer") return line_transformer();
  if (name == "cycle-breaker-strawman") return cycle_breaker_strawman();
  throw ModelError("unknown protocol '" + std::string(name) + "'");
}

}  // namespace netcon
