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

#include <cstdint>
#include <cmath>
#include <stdexcept>

#include "nyucsim/common.hpp"

namespace nyucsim {

/// Counter-based pseudo-random stream with splittable substreams.
///
/// The generator is the splitmix64 output function applied to a per-stream
/// key plus a call counter, so a stream is a pure function of
/// (seed, stream id, call index) and reproduces bit-identical draws across
/// runs and platforms. All samplers below are implemented on top of the
/// uniform primitive (the standard-library distributions are
/// implementation-defined and would break cross-platform reproducibility).
///
/// Distinct substream ids derive statistically independent streams; drops
/// and links each get their own substream.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : key_(derive_key(mix(seed ^ 0xA5A5A5A5DEADBEEFull), stream_id))
    {
    }

    /// Derives an independent child stream; the parent is not advanced.
    [[nodiscard]] RngStream substream(std::uint64_t id) const
    {
        RngStream child(*this);
        child.key_ = derive_key(key_, id);
        child.counter_ = 0;
        child.has_cached_normal_ = false;
        return child;
    }

    [[nodiscard]] RngStream substream(std::uint64_t a, std::uint64_t b) const
    {
        return substream(a).substream(b);
    }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * golden_); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Discrete uniform on the inclusive range {lo, ..., hi}.
    long uniform_int(long lo, long hi)
    {
        if (hi < lo)
            throw std::invalid_argument("uniform_int: empty range");
        const auto span = static_cast<double>(hi - lo + 1);
        return lo + static_cast<long>(uniform01() * span);
    }

    /// Standard normal via Box-Muller; the paired deviate is cached.
    double normal()
    {
        if (has_cached_normal_)
        {
            has_cached_normal_ = false;
            return cached_normal_;
        }
        const double u1 = 1.0 - uniform01(); // (0, 1], keeps log finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * pi * u2;
        cached_normal_ = r * std::sin(a);
        has_cached_normal_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    /// Exponential with the given mean (not rate).
    double exponential(double mean)
    {
        if (mean < 0.0)
            throw std::invalid_argument("exponential: negative mean");
        if (mean == 0.0)
            return 0.0;
        return -mean * std::log(1.0 - uniform01());
    }

    double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

    /// Gamma(shape, scale) by Marsaglia-Tsang squeeze.
    double gamma(double shape, double scale)
    {
        if (shape <= 0.0 || scale <= 0.0)
            throw std::invalid_argument("gamma: shape and scale must be positive");
        if (shape < 1.0)
        {
            const double u = 1.0 - uniform01();
            return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / (3.0 * std::sqrt(d));
        for (;;)
        {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0)
                continue;
            v = v * v * v;
            const double u = 1.0 - uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x)
                return d * v * scale;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
                return d * v * scale;
        }
    }

    /// Poisson by Knuth's product method; fine for the small rates used here.
    long poisson(double lambda)
    {
        if (lambda < 0.0)
            throw std::invalid_argument("poisson: negative rate");
        if (lambda == 0.0)
            return 0;
        const double limit = std::exp(-lambda);
        long k = 0;
        double p = 1.0;
        do
        {
            ++k;
            p *= uniform01();
        } while (p > limit);
        return k - 1;
    }

private:
    static constexpr std::uint64_t golden_ = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix(std::uint64_t z)
    {
        z += golden_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static std::uint64_t derive_key(std::uint64_t parent, std::uint64_t id)
    {
        return mix(parent ^ mix(id * 0xD2B74407B1CE6E93ull + 0x8CB92BA72F3D8DD7ull));
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

} // namespace nyucsim
