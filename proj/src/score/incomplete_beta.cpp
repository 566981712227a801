#include <cmath>
#include <limits>
#include <string>

#include "grangernet/error.hpp"
#include "grangernet/score.hpp"

namespace grangernet {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 200000;

// Continued fraction for I_x(a, b) (modified Lentz), valid for x < (a+1)/(a+b+2).
double beta_continued_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double dm = m;
        const double m2 = 2.0 * dm;
        double aa = dm * (b - dm) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + dm) * (qab + dm) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw Error(ErrorCode::DomainError, "incomplete beta continued fraction did not converge for a=" +
                                            std::to_string(a) + " b=" + std::to_string(b));
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// ln of x^a (1-x)^b / B(a, b), with y = 1 - x supplied exactly by the caller.
double log_front(double x, double y, double a, double b) {
    return a * std::log(x) + b * std::log(y) - log_beta(a, b);
}

void check_domain(double x, double a, double b) {
    if (!(x >= 0.0 && x <= 1.0) || !(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw Error(ErrorCode::DomainError, "incomplete beta needs x in [0,1], a > 0, b > 0 (x=" +
                                                std::to_string(x) + ", a=" + std::to_string(a) +
                                                ", b=" + std::to_string(b) + ")");
    }
}

// Returns ln I_x(a, b); `y` is 1 - x computed without cancellation.
double log_ibeta(double x, double y, double a, double b) {
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    if (y <= 0.0) return 0.0;
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return log_front(x, y, a, b) + std::log(beta_continued_fraction(a, b, x)) - std::log(a);
    }
    const double complement = std::exp(log_front(x, y, a, b) + std::log(beta_continued_fraction(b, a, y)) - std::log(b));
    return std::log1p(-complement);
}

double ibeta(double x, double y, double a, double b) {
    if (x <= 0.0) return 0.0;
    if (y <= 0.0) return 1.0;
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(log_front(x, y, a, b)) * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - std::exp(log_front(x, y, a, b)) * beta_continued_fraction(b, a, y) / b;
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
    check_domain(x, a, b);
    return ibeta(x, 1.0 - x, a, b);
}

double log_incomplete_beta(double x, double a, double b) {
    check_domain(x, a, b);
    return log_ibeta(x, 1.0 - x, a, b);
}

double student_t_cdf(double t, double df) {
    if (std::isnan(t) || !(df > 0.0)) throw Error(ErrorCode::DomainError, "student t needs df > 0");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double t2 = t * t;
    const double tail = 0.5 * ibeta(df / (df + t2), t2 / (df + t2), 0.5 * df, 0.5);
    return t < 0.0 ? tail : 1.0 - tail;
}

double student_t_log_cdf(double t, double df) {
    if (std::isnan(t) || !(df > 0.0)) throw Error(ErrorCode::DomainError, "student t needs df > 0");
    if (std::isinf(t)) return t > 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    const double t2 = t * t;
    const double log_tail = std::log(0.5) + log_ibeta(df / (df + t2), t2 / (df + t2), 0.5 * df, 0.5);
    return t < 0.0 ? log_tail : std::log1p(-std::exp(log_tail));
}

double f_upper_tail(double f, double d1, double d2) {
    if (std::isnan(f) || !(d1 > 0.0) || !(d2 > 0.0)) throw Error(ErrorCode::DomainError, "F needs d1, d2 > 0");
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    const double denom = d2 + d1 * f;
    return ibeta(d2 / denom, d1 * f / denom, 0.5 * d2, 0.5 * d1);
}

double f_log_upper_tail(double f, double d1, double d2) {
    if (std::isnan(f) || !(d1 > 0.0) || !(d2 > 0.0)) throw Error(ErrorCode::DomainError, "F needs d1, d2 > 0");
    if (f <= 0.0) return 0.0;
    if (std::isinf(f)) return -std::numeric_limits<double>::infinity();
    const double denom = d2 + d1 * f;
    return log_ibeta(d2 / denom, d1 * f / denom, 0.5 * d2, 0.5 * d1);
}

}  // namespace grangernet
