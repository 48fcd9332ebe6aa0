// SPDX-License-Identifier: Apache-2.0
//
// nyucsim - drop-based statistical channel simulator for 0.5-150 GHz
// Copyright (C) 2026 the nyucsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "nyucsim/common.hpp"
#include "nyucsim/types.hpp"
#include "nyucsim/rng.hpp"
#include "nyucsim/geometry.hpp"
#include "nyucsim/params.hpp"
#include "nyucsim/channel_condition.hpp"
#include "nyucsim/large_scale.hpp"
#include "nyucsim/small_scale.hpp"
#include "nyucsim/antenna.hpp"
#include "nyucsim/matrix_psd.hpp"
#include "nyucsim/stats.hpp"
#include "nyucsim/harness.hpp"
