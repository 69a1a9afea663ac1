#pragma once

// Shared vocabulary: fixed-size linear algebra aliases, error types,
// deterministic random sampling and a small deterministic parallel loop.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace twistorlab {

using cplx = std::complex<double>;

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using CVec4 = Eigen::Vector4cd;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using CMat = Eigen::MatrixXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Evaluation outside the domain of a map (real line under pi, x = 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Structurally invalid input: wrong degree, singular matrix, bad shape.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Not enough samples to determine the unknowns; carries the required count.
class InsufficientSamples : public std::invalid_argument {
public:
    InsufficientSamples(const std::string& what, std::size_t required)
        : std::invalid_argument(what), required_(required) {}
    std::size_t required() const noexcept { return required_; }

private:
    std::size_t required_;
};

/// Seeded sampler used by every experiment; identical seed -> identical stream.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    Vec4 normal4() { return Vec4(normal(), normal(), normal(), normal()); }
    CVec4 cnormal4() {
        CVec4 z;
        for (int i = 0; i < 4; ++i) z(i) = cplx(normal(), normal());
        return z;
    }
    Mat2 normal2x2(double scale = 1.0) {
        Mat2 m;
        m << normal(), normal(), normal(), normal();
        return scale * m;
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Worker count: TWISTORLAB_THREADS if set, else hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("TWISTORLAB_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n). Each index is handled by exactly one
/// thread, so callers writing to slot i get order-independent results.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace twistorlab
