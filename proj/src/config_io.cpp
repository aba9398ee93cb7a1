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

#include "hpb/config_io.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hpb
{
    namespace
    {
        std::string trim(std::string_view s)
        {
            const auto first = s.find_first_not_of(" \t\r");
            if (first == std::string_view::npos)
                return {};
            const auto last = s.find_last_not_of(" \t\r");
            return std::string(s.substr(first, last - first + 1));
        }

        struct LineError
        {
            std::size_t line;
            std::string message;
        };

        double to_double(const std::string &text, std::size_t line)
        {
            std::size_t used = 0;
            double value = 0.0;
            try
            {
                value = std::stod(text, &used);
            }
            catch (const std::exception &)
            {
                used = 0;
            }
            if (used == 0 || used != text.size())
                throw LineError{line, "expected a number, got '" + text + "'"};
            return value;
        }

        int to_int(const std::string &text, std::size_t line)
        {
            const double value = to_double(text, line);
            if (value != std::round(value))
                throw LineError{line, "expected an integer, got '" + text + "'"};
            return static_cast<int>(value);
        }

        std::vector<double> to_list(const std::string &text, std::size_t line)
        {
            std::vector<double> out;
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ','))
                out.push_back(to_double(trim(item), line));
            if (out.empty())
                throw LineError{line, "empty list"};
            return out;
        }

        InitMode to_init(const std::string &text, std::size_t line)
        {
            if (text == "ones")
                return InitMode::ones;
            if (text == "warm_start")
                return InitMode::warm_start;
            if (text == "random")
                return InitMode::random;
            throw LineError{line, "unknown init mode '" + text + "' (ones, warm_start, random)"};
        }
    }

    ScenarioFile parse_scenario(std::string_view text)
    {
        ScenarioFile out;
        auto &s = out.system;
        auto &o = out.params;

        using Setter = std::function<void(const std::string &, std::size_t)>;
        const std::map<std::string, Setter, std::less<>> setters{
            {"M", [&](const std::string &v, std::size_t l) { s.M = to_int(v, l); }},
            {"N", [&](const std::string &v, std::size_t l) { s.N = to_int(v, l); }},
            {"L", [&](const std::string &v, std::size_t l) { s.L = to_int(v, l); }},
            {"delta", [&](const std::string &v, std::size_t l) { s.delta = to_double(v, l); }},
            {"lambda", [&](const std::string &v, std::size_t l) { s.lambda = to_double(v, l); }},
            {"p", [&](const std::string &v, std::size_t l) { s.p = to_double(v, l); }},
            {"sigma2", [&](const std::string &v, std::size_t l) { s.sigma2 = to_double(v, l); }},
            {"sigma2_dbm", [&](const std::string &v, std::size_t l) { s.sigma2 = db_to_linear(to_double(v, l)) * 1e-3; }},
            {"d1", [&](const std::string &v, std::size_t l) { s.d1 = to_list(v, l); }},
            {"d2", [&](const std::string &v, std::size_t l) { s.d2 = to_list(v, l); }},
            {"g_bs", [&](const std::string &v, std::size_t l) { s.g_bs = to_double(v, l); }},
            {"g_ris", [&](const std::string &v, std::size_t l) { s.g_ris = to_double(v, l); }},
            {"g_user", [&](const std::string &v, std::size_t l) { s.g_user = to_double(v, l); }},
            {"g_bs_dbi", [&](const std::string &v, std::size_t l) { s.g_bs = db_to_linear(to_double(v, l)); }},
            {"g_ris_dbi", [&](const std::string &v, std::size_t l) { s.g_ris = db_to_linear(to_double(v, l)); }},
            {"g_user_dbi", [&](const std::string &v, std::size_t l) { s.g_user = db_to_linear(to_double(v, l)); }},
            {"P", [&](const std::string &v, std::size_t l) { s.P = to_int(v, l); }},
            {"sigma_as", [&](const std::string &v, std::size_t l) { s.sigma_as = to_double(v, l); }},
            {"sigma_as_deg", [&](const std::string &v, std::size_t l) { s.sigma_as = deg_to_rad(to_double(v, l)); }},
            {"i_sca", [&](const std::string &v, std::size_t l) { s.i_sca = to_int(v, l); }},
            {"eps_sca", [&](const std::string &v, std::size_t l) { s.eps_sca = to_double(v, l); }},
            {"sa_iters", [&](const std::string &v, std::size_t l) { o.sa_iters = to_int(v, l); }},
            {"sa_t0", [&](const std::string &v, std::size_t l) { o.sa_t0 = to_double(v, l); }},
            {"sa_cooling", [&](const std::string &v, std::size_t l) { o.sa_cooling = to_double(v, l); }},
            {"sa_step", [&](const std::string &v, std::size_t l) { o.sa_step = to_double(v, l); }},
            {"ao_outer_iters", [&](const std::string &v, std::size_t l) { o.ao_outer_iters = to_int(v, l); }},
            {"es_grid", [&](const std::string &v, std::size_t l) { o.es_grid = to_int(v, l); }},
            {"random_trials", [&](const std::string &v, std::size_t l) { o.random_trials = to_int(v, l); }},
            {"v_init", [&](const std::string &v, std::size_t l) { o.v_init = to_init(v, l); }},
            {"pb_init", [&](const std::string &v, std::size_t l) { o.pb_init = to_init(v, l); }},
        };

        std::istringstream in{std::string(text)};
        std::string raw;
        std::size_t line = 0;
        try
        {
            while (std::getline(in, raw))
            {
                ++line;
                const auto hash = raw.find('#');
                const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
                if (body.empty())
                    continue;
                const auto eq = body.find('=');
                if (eq == std::string::npos)
                    throw LineError{line, "expected 'key = value'"};
                const std::string key = trim(body.substr(0, eq));
                const std::string value = trim(body.substr(eq + 1));
                const auto it = setters.find(key);
                if (it == setters.end())
                    throw LineError{line, "unknown key '" + key + "'"};
                if (value.empty())
                    throw LineError{line, "missing value for '" + key + "'"};
                it->second(value, line);
            }
        }
        catch (const LineError &e)
        {
            throw std::invalid_argument("config line " + std::to_string(e.line) + ": " + e.message);
        }

        s.validate();
        o.validate();
        return out;
    }

    ScenarioFile load_scenario(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open config file '" + path + "'");
        std::stringstream buffer;
        buffer << in.rdbuf();
        try
        {
            return parse_scenario(buffer.str());
        }
        catch (const std::invalid_argument &e)
        {
            throw std::invalid_argument(path + ": " + e.what());
        }
    }
}
