// Copyright 2026 The uavicic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "uavicic/antenna.hpp"
#include "uavicic/channel.hpp"
#include "uavicic/channel_state.hpp"
#include "uavicic/common.hpp"
#include "uavicic/decentral.hpp"
#include "uavicic/dual_bound.hpp"
#include "uavicic/icic.hpp"
#include "uavicic/pathloss.hpp"
#include "uavicic/rates.hpp"
#include "uavicic/report.hpp"
#include "uavicic/rng.hpp"
#include "uavicic/scenario.hpp"
#include "uavicic/scheduler.hpp"
#include "uavicic/topology.hpp"
