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
//
// Summary statistics of realizations (RMS delay/angular spreads) and the
// goodness-of-fit machinery used by the distribution validation report.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "nyucsim/common.hpp"
#include "nyucsim/small_scale.hpp"

namespace nyucsim {

/// Power-weighted RMS delay spread in ns over the resolvable subpaths.
inline double rms_delay_spread_ns(const std::vector<Subpath>& subpaths)
{
    double p_sum = 0.0, t_sum = 0.0, t2_sum = 0.0;
    for (const Subpath& sp : subpaths)
    {
        p_sum += sp.power_mw;
        t_sum += sp.power_mw * sp.delay_ns;
        t2_sum += sp.power_mw * sp.delay_ns * sp.delay_ns;
    }
    if (p_sum <= 0.0)
        return 0.0;
    const double mean = t_sum / p_sum;
    return std::sqrt(std::max(0.0, t2_sum / p_sum - mean * mean));
}

/// Circular power-weighted RMS angular spread in degrees,
/// sqrt(-2 ln |sum P e^{j theta} / sum P|).
inline double rms_angular_spread_deg(const std::vector<Subpath>& subpaths,
                                     double Subpath::*angle_deg)
{
    if (subpaths.size() < 2)
        return 0.0;
    double p_sum = 0.0;
    std::complex<double> acc(0.0, 0.0);
    for (const Subpath& sp : subpaths)
    {
        p_sum += sp.power_mw;
        acc += sp.power_mw * std::polar(1.0, deg2rad(sp.*angle_deg));
    }
    if (p_sum <= 0.0)
        return 0.0;
    const double r = std::min(1.0, std::abs(acc) / p_sum);
    if (r <= 0.0)
        return rad2deg(std::sqrt(2.0)); // fully spread
    return rad2deg(std::sqrt(-2.0 * std::log(r)));
}

struct AngularSpreads {
    double aod_az_deg = 0.0;
    double zod_deg = 0.0;
    double aoa_az_deg = 0.0;
    double zoa_deg = 0.0;
};

inline AngularSpreads angular_spreads(const std::vector<Subpath>& subpaths)
{
    return {rms_angular_spread_deg(subpaths, &Subpath::aod_az_gcs_deg),
            rms_angular_spread_deg(subpaths, &Subpath::zod_deg),
            rms_angular_spread_deg(subpaths, &Subpath::aoa_az_gcs_deg),
            rms_angular_spread_deg(subpaths, &Subpath::zoa_deg)};
}

// ------------------------------------------------------- goodness of fit

struct GofResult {
    std::string name;
    std::string method; // "ks" or "chi2"
    std::size_t samples = 0;
    double statistic = 0.0;
    double p_value = 0.0;
    bool sufficient = true;
};

/// Asymptotic Kolmogorov distribution complement with the Stephens small-n
/// correction.
inline double ks_p_value(double d_statistic, std::size_t n)
{
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d_statistic;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k)
    {
        const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) *
                            std::exp(-2.0 * lambda * lambda * k * k);
        sum += term;
        if (std::abs(term) < 1e-12)
            break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

/// One-sample Kolmogorov-Smirnov test of samples against a CDF.
inline GofResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                         const std::string& name)
{
    GofResult r;
    r.name = name;
    r.method = "ks";
    r.samples = samples.size();
    if (samples.size() < 10)
    {
        r.sufficient = false;
        return r;
    }
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    r.statistic = d;
    r.p_value = ks_p_value(d, samples.size());
    return r;
}

/// Chi-square test of observed counts against expected counts. Bins with an
/// expected count below 5 are pooled into their neighbor.
inline GofResult chi2_test(const std::vector<double>& observed, const std::vector<double>& expected,
                           const std::string& name)
{
    if (observed.size() != expected.size() || observed.empty())
        throw std::invalid_argument("chi2_test: bin mismatch");
    GofResult r;
    r.name = name;
    r.method = "chi2";
    double total = 0.0;
    for (double o : observed)
        total += o;
    r.samples = static_cast<std::size_t>(total);

    std::vector<double> obs, exp;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i)
    {
        o_acc += observed[i];
        e_acc += expected[i];
        if (e_acc >= 5.0)
        {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (e_acc > 0.0)
    {
        if (exp.empty())
        {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
        }
        else
        {
            obs.back() += o_acc;
            exp.back() += e_acc;
        }
    }
    if (exp.size() < 2)
    {
        // degenerate distribution (single support point): exact match or fail
        r.method = "exact";
        r.statistic = std::abs(obs.front() - exp.front());
        r.p_value = (r.statistic < 0.5) ? 1.0 : 0.0;
        return r;
    }
    double chi2 = 0.0;
    for (std::size_t i = 0; i < exp.size(); ++i)
    {
        const double diff = obs[i] - exp[i];
        chi2 += diff * diff / exp[i];
    }
    const double dof = static_cast<double>(exp.size() - 1);
    r.statistic = chi2;
    r.p_value = boost::math::gamma_q(dof / 2.0, chi2 / 2.0);
    return r;
}

/// Builds a count histogram over integer outcomes 1..k_max plus a tail bin
/// for everything above, and runs chi2 against the pmf.
inline GofResult chi2_integer_test(const std::vector<long>& draws,
                                   const std::function<double(long)>& pmf, long k_max,
                                   const std::string& name)
{
    std::vector<double> observed(static_cast<std::size_t>(k_max) + 1, 0.0);
    for (long d : draws)
    {
        if (d < 1)
            throw std::invalid_argument("chi2_integer_test: draw below support");
        if (d <= k_max)
            observed[static_cast<std::size_t>(d - 1)] += 1.0;
        else
            observed.back() += 1.0;
    }
    std::vector<double> expected(static_cast<std::size_t>(k_max) + 1, 0.0);
    double tail = 1.0;
    for (long k = 1; k <= k_max; ++k)
    {
        const double p = pmf(k);
        expected[static_cast<std::size_t>(k - 1)] = p * static_cast<double>(draws.size());
        tail -= p;
    }
    expected.back() = std::max(0.0, tail) * static_cast<double>(draws.size());
    return chi2_test(observed, expected, name);
}

// ------------------------------------------ reference CDFs for the oracles

inline double normal_cdf(double x, double mean, double sigma)
{
    if (sigma <= 0.0)
        return x < mean ? 0.0 : 1.0;
    return 0.5 * std::erfc(-(x - mean) / (sigma * std::sqrt(2.0)));
}

inline double exponential_cdf(double x, double mean)
{
    return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x / mean);
}

inline double gamma_cdf(double x, double shape, double scale)
{
    return x <= 0.0 ? 0.0 : boost::math::gamma_p(shape, x / scale);
}

inline double uniform_cdf(double x, double lo, double hi)
{
    if (x <= lo)
        return 0.0;
    if (x >= hi)
        return 1.0;
    return (x - lo) / (hi - lo);
}

/// CDF of |X1 - X2| for iid Gamma(shape, scale), tabulated by quadrature in
/// the quantile domain: F_D(d) = E_u[ F(Q(u)+d) - F(max(Q(u)-d, 0)) ].
/// The returned function interpolates the table.
inline std::function<double(double)> gamma_abs_diff_cdf(double shape, double scale)
{
    const int nu = 800;  // quantile-grid resolution (midpoint rule)
    const int nd = 320;  // tabulated d values
    const double d_hi = boost::math::gamma_p_inv(shape, 0.99999) * scale;

    std::vector<double> q(static_cast<std::size_t>(nu));
    for (int i = 0; i < nu; ++i)
        q[static_cast<std::size_t>(i)] =
            boost::math::gamma_p_inv(shape, (i + 0.5) / nu) * scale;

    auto d_grid = std::make_shared<std::vector<double>>(static_cast<std::size_t>(nd) + 1);
    auto f_grid = std::make_shared<std::vector<double>>(static_cast<std::size_t>(nd) + 1);
    for (int j = 0; j <= nd; ++j)
    {
        const double d = d_hi * static_cast<double>(j) / nd;
        double acc = 0.0;
        for (int i = 0; i < nu; ++i)
        {
            const double x = q[static_cast<std::size_t>(i)];
            const double hi = gamma_cdf(x + d, shape, scale);
            const double lo = (x > d) ? gamma_cdf(x - d, shape, scale) : 0.0;
            acc += hi - lo;
        }
        (*d_grid)[static_cast<std::size_t>(j)] = d;
        (*f_grid)[static_cast<std::size_t>(j)] = acc / nu;
    }

    return [d_grid, f_grid](double d) -> double {
        if (d <= 0.0)
            return 0.0;
        if (d >= d_grid->back())
            return f_grid->back();
        const auto it = std::lower_bound(d_grid->begin(), d_grid->end(), d);
        const auto i = static_cast<std::size_t>(it - d_grid->begin());
        if (i == 0)
            return f_grid->front();
        const double d0 = (*d_grid)[i - 1], d1 = (*d_grid)[i];
        const double f0 = (*f_grid)[i - 1], f1 = (*f_grid)[i];
        return f0 + (f1 - f0) * (d - d0) / (d1 - d0);
    };
}

inline double poisson_plus_one_pmf(long k, double lambda)
{
    if (k < 1)
        return 0.0;
    const long j = k - 1; // Poisson count
    double log_p = -lambda + j * std::log(lambda);
    for (long i = 2; i <= j; ++i)
        log_p -= std::log(static_cast<double>(i));
    return std::exp(log_p);
}

inline double discrete_uniform_pmf(long k, long lo, long hi)
{
    return (k >= lo && k <= hi) ? 1.0 / static_cast<double>(hi - lo + 1) : 0.0;
}

/// pmf of max(1, round(Exp(mean))).
inline double discrete_exponential_pmf(long k, double mean)
{
    if (k < 1)
        return 0.0;
    if (k == 1)
        return 1.0 - std::exp(-1.5 / mean);
    return std::exp(-(static_cast<double>(k) - 0.5) / mean) -
           std::exp(-(static_cast<double>(k) + 0.5) / mean);
}

/// pmf of the indoor composite: point mass at 1 with weight (1 - beta), else
/// the discrete exponential.
inline double composite_subpath_pmf(long k, double beta, double mean)
{
    const double de = discrete_exponential_pmf(k, mean);
    return (k == 1) ? (1.0 - beta) + beta * de : beta * de;
}

} // namespace nyucsim
