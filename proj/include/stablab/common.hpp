#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace stablab {

using Vec = std::vector<double>;

// Error hierarchy. The CLI maps these onto exit codes:
//   ParamError -> 2, DomainError -> 3, DegenerateEstimateError -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParamError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct SingularityError : DomainError {
    using DomainError::DomainError;
};

struct QuadratureError : Error {
    double partial;
    QuadratureError(const std::string& msg, double partial_estimate)
        : Error(msg), partial(partial_estimate) {}
};

struct NonTerminationError : Error {
    using Error::Error;
};

struct DegenerateEstimateError : Error {
    using Error::Error;
};

struct FatnessError : Error {
    using Error::Error;
};

struct NotImplementedError : Error {
    using Error::Error;
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec add(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec scaled(const Vec& a, double c) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

inline double dist(const Vec& a, const Vec& b) { return norm(sub(a, b)); }

// x with its last coordinate dropped (the \tilde{x} of graph domains).
inline Vec lateral(const Vec& x) { return Vec(x.begin(), x.end() - 1); }

}  // namespace stablab
