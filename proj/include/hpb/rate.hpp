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

#ifndef HPB_RATE_HPP
#define HPB_RATE_HPP

#include <Eigen/Dense>

namespace hpb
{
    // log2(1 + |h^H w|^2 / sigma2) in bits/s/Hz. `channel_row` is the effective 1 x M channel h^H.
    double achievable_rate(const Eigen::RowVectorXcd &channel_row, const Eigen::VectorXcd &w, double sigma2);
}

#endif
