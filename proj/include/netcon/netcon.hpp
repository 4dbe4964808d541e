// Copyright 2026 The netcon Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "netcon/analysis.hpp"
#include "netcon/model.hpp"
#include "netcon/protocols.hpp"
#include "netcon/schedulers.hpp"
#include "netcon/tm.hpp"
#include "netcon/topology.hpp"
