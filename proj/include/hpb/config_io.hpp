// SPDX-License-Identifier: Apache-2.0
//
// hpb: hierarchical passive beamforming for RIS-aided downlinks
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

#ifndef HPB_CONFIG_IO_HPP
#define HPB_CONFIG_IO_HPP

#include "hpb/channel_model.hpp"
#include "hpb/optimizers.hpp"

#include <string>
#include <string_view>

namespace hpb
{
    struct ScenarioFile
    {
        SystemConfig system;
        OptimizerParams params;
    };

    /*!
    Parses flat `key = value` text. Blank lines and `#` comments are ignored.

    Keys follow the SystemConfig / OptimizerParams field names. Alternate units are accepted through suffixed
    keys: `g_bs_dbi`, `g_ris_dbi`, `g_user_dbi`, `sigma2_dbm`, `sigma_as_deg`. `d1` and `d2` take a single value
    or a comma-separated list with one entry per RIS. Unknown keys and malformed values throw
    std::invalid_argument with the line number.
    */
    ScenarioFile parse_scenario(std::string_view text);

    ScenarioFile load_scenario(const std::string &path);
}

#endif
