#pragma once

#include <cassert>
#include <cmath>
#include <type_traits>
#include <vector>

namespace folab {

/// First-order multivariate dual number over the real type R: a value plus
/// its gradient with respect to a fixed set of seed directions. All
/// arithmetic propagates the chain rule exactly, so quantities computed
/// from duals carry exact first derivatives (to roundoff of R).
template <class R>
class DualT {
public:
    R v = 0;
    std::vector<R> d;

    DualT() = default;
    DualT(R value, std::vector<R> grad) : v(value), d(std::move(grad)) {}

    static DualT constant(R value, int dims) { return {value, std::vector<R>(dims, R(0))}; }
    static DualT variable(R value, int index, int dims) {
        DualT r = constant(value, dims);
        r.d[index] = 1;
        return r;
    }

    int dims() const { return static_cast<int>(d.size()); }

    DualT& operator+=(const DualT& o) {
        v += o.v;
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += o.d[i];
        return *this;
    }
    DualT& operator-=(const DualT& o) {
        v -= o.v;
        for (std::size_t i = 0; i < d.size(); ++i) d[i] -= o.d[i];
        return *this;
    }
    DualT& operator*=(R c) {
        v *= c;
        for (R& x : d) x *= c;
        return *this;
    }
};

using Dual = DualT<double>;

template <class R> DualT<R> operator+(DualT<R> a, const DualT<R>& b) { return a += b; }
template <class R> DualT<R> operator-(DualT<R> a, const DualT<R>& b) { return a -= b; }
template <class R> DualT<R> operator-(DualT<R> a) { return a *= R(-1); }
template <class R> DualT<R> operator*(DualT<R> a, std::type_identity_t<R> c) { return a *= c; }
template <class R> DualT<R> operator*(std::type_identity_t<R> c, DualT<R> a) { return a *= c; }

template <class R>
DualT<R> operator*(const DualT<R>& a, const DualT<R>& b) {
    DualT<R> r;
    r.v = a.v * b.v;
    r.d.resize(a.d.size());
    for (std::size_t i = 0; i < a.d.size(); ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
}

template <class R> DualT<R> operator+(DualT<R> a, std::type_identity_t<R> c) { a.v += c; return a; }
template <class R> DualT<R> operator+(std::type_identity_t<R> c, DualT<R> a) { a.v += c; return a; }
template <class R> DualT<R> operator-(DualT<R> a, std::type_identity_t<R> c) { a.v -= c; return a; }
template <class R> DualT<R> operator-(std::type_identity_t<R> c, const DualT<R>& a) { return (-a) + c; }

/// f(u) for scalar f with derivative f1 at u.v.
template <class R>
DualT<R> chain(const DualT<R>& u, std::type_identity_t<R> f, std::type_identity_t<R> f1) {
    DualT<R> r;
    r.v = f;
    r.d.resize(u.d.size());
    for (std::size_t i = 0; i < u.d.size(); ++i) r.d[i] = f1 * u.d[i];
    return r;
}

template <class R> DualT<R> inv(const DualT<R>& u) { return chain(u, R(1) / u.v, R(-1) / (u.v * u.v)); }
template <class R> DualT<R> operator/(const DualT<R>& a, const DualT<R>& b) { return a * inv(b); }
template <class R> DualT<R> operator/(const DualT<R>& a, std::type_identity_t<R> c) { return a * (R(1) / c); }
template <class R> DualT<R> operator/(std::type_identity_t<R> c, const DualT<R>& b) {
    return chain(b, c / b.v, -c / (b.v * b.v));
}

template <class R> DualT<R> sin(const DualT<R>& u) { return chain(u, std::sin(u.v), std::cos(u.v)); }
template <class R> DualT<R> cos(const DualT<R>& u) { return chain(u, std::cos(u.v), -std::sin(u.v)); }
template <class R> DualT<R> exp(const DualT<R>& u) { R e = std::exp(u.v); return chain(u, e, e); }
template <class R> DualT<R> log(const DualT<R>& u) { return chain(u, std::log(u.v), R(1) / u.v); }
template <class R> DualT<R> sqrt(const DualT<R>& u) { R s = std::sqrt(u.v); return chain(u, s, R(0.5) / s); }
template <class R> DualT<R> tan(const DualT<R>& u) { R t = std::tan(u.v); return chain(u, t, R(1) + t * t); }
template <class R> DualT<R> sinh(const DualT<R>& u) { return chain(u, std::sinh(u.v), std::cosh(u.v)); }
template <class R> DualT<R> cosh(const DualT<R>& u) { return chain(u, std::cosh(u.v), std::sinh(u.v)); }
template <class R> DualT<R> tanh(const DualT<R>& u) { R t = std::tanh(u.v); return chain(u, t, R(1) - t * t); }
template <class R> DualT<R> atan(const DualT<R>& u) { return chain(u, std::atan(u.v), R(1) / (R(1) + u.v * u.v)); }
template <class R>
DualT<R> powi(const DualT<R>& u, long long n) {
    if (n == 0) return DualT<R>::constant(1, u.dims());
    const R dn = static_cast<R>(n);
    return chain(u, std::pow(u.v, dn), dn * std::pow(u.v, dn - R(1)));
}
template <class R> DualT<R> pow(const DualT<R>& a, const DualT<R>& b) { return exp(b * log(a)); }

/// Second-order multivariate jet over the real type R: value, gradient and
/// (symmetric) Hessian with respect to a fixed set of seed directions.
/// This is the derivative-carrying number behind every curvature quantity:
/// evaluating the metric through Jet2 supplies the second metric
/// derivatives the curvature tensor needs without any finite-difference
/// step.
template <class R>
class Jet2T {
public:
    R v = 0;
    std::vector<R> d;  // gradient, size n
    std::vector<R> h;  // Hessian, row-major n*n, kept symmetric

    Jet2T() = default;
    Jet2T(R value, std::vector<R> grad, std::vector<R> hess)
        : v(value), d(std::move(grad)), h(std::move(hess)) {}

    static Jet2T constant(R value, int dims) {
        return {value, std::vector<R>(dims, R(0)),
                std::vector<R>(static_cast<std::size_t>(dims) * dims, R(0))};
    }
    static Jet2T variable(R value, int index, int dims) {
        Jet2T r = constant(value, dims);
        r.d[index] = 1;
        return r;
    }

    int dims() const { return static_cast<int>(d.size()); }
    R hess(int i, int j) const { return h[static_cast<std::size_t>(i) * d.size() + j]; }

    /// True when gradient and Hessian vanish identically (a literal).
    bool is_constant() const {
        for (R x : d)
            if (x != R(0)) return false;
        for (R x : h)
            if (x != R(0)) return false;
        return true;
    }

    /// Slice to a first-order dual (drop the Hessian).
    DualT<R> dual() const { return {v, d}; }
    /// The a-th partial as a first-order dual: value d[a], gradient = Hessian row a.
    DualT<R> partial(int a) const {
        const std::size_t n = d.size();
        std::vector<R> row(n);
        for (std::size_t j = 0; j < n; ++j) row[j] = h[a * n + j];
        return {d[a], std::move(row)};
    }

    Jet2T& operator+=(const Jet2T& o) {
        v += o.v;
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += o.d[i];
        for (std::size_t i = 0; i < h.size(); ++i) h[i] += o.h[i];
        return *this;
    }
    Jet2T& operator-=(const Jet2T& o) {
        v -= o.v;
        for (std::size_t i = 0; i < d.size(); ++i) d[i] -= o.d[i];
        for (std::size_t i = 0; i < h.size(); ++i) h[i] -= o.h[i];
        return *this;
    }
    Jet2T& operator*=(R c) {
        v *= c;
        for (R& x : d) x *= c;
        for (R& x : h) x *= c;
        return *this;
    }
};

using Jet2 = Jet2T<double>;

template <class R> Jet2T<R> operator+(Jet2T<R> a, const Jet2T<R>& b) { return a += b; }
template <class R> Jet2T<R> operator-(Jet2T<R> a, const Jet2T<R>& b) { return a -= b; }
template <class R> Jet2T<R> operator-(Jet2T<R> a) { return a *= R(-1); }
template <class R> Jet2T<R> operator*(Jet2T<R> a, std::type_identity_t<R> c) { return a *= c; }
template <class R> Jet2T<R> operator*(std::type_identity_t<R> c, Jet2T<R> a) { return a *= c; }
template <class R> Jet2T<R> operator+(Jet2T<R> a, std::type_identity_t<R> c) { a.v += c; return a; }
template <class R> Jet2T<R> operator+(std::type_identity_t<R> c, Jet2T<R> a) { a.v += c; return a; }
template <class R> Jet2T<R> operator-(Jet2T<R> a, std::type_identity_t<R> c) { a.v -= c; return a; }
template <class R> Jet2T<R> operator-(std::type_identity_t<R> c, const Jet2T<R>& a) { return (-a) + c; }

template <class R>
Jet2T<R> operator*(const Jet2T<R>& a, const Jet2T<R>& b) {
    const std::size_t n = a.d.size();
    Jet2T<R> r;
    r.v = a.v * b.v;
    r.d.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    r.h.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            r.h[i * n + j] = a.h[i * n + j] * b.v + a.v * b.h[i * n + j] + a.d[i] * b.d[j] +
                             a.d[j] * b.d[i];
    return r;
}

/// f(u) for scalar f with first and second derivatives f1, f2 at u.v.
template <class R>
Jet2T<R> chain(const Jet2T<R>& u, std::type_identity_t<R> f, std::type_identity_t<R> f1,
               std::type_identity_t<R> f2) {
    const std::size_t n = u.d.size();
    Jet2T<R> r;
    r.v = f;
    r.d.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.d[i] = f1 * u.d[i];
    r.h.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            r.h[i * n + j] = f1 * u.h[i * n + j] + f2 * u.d[i] * u.d[j];
    return r;
}

template <class R>
Jet2T<R> inv(const Jet2T<R>& u) {
    const R w = R(1) / u.v;
    return chain(u, w, -w * w, R(2) * w * w * w);
}
template <class R> Jet2T<R> operator/(const Jet2T<R>& a, const Jet2T<R>& b) { return a * inv(b); }
template <class R> Jet2T<R> operator/(const Jet2T<R>& a, std::type_identity_t<R> c) { return a * (R(1) / c); }
template <class R> Jet2T<R> operator/(std::type_identity_t<R> c, const Jet2T<R>& b) { return inv(b) * c; }

template <class R> Jet2T<R> sin(const Jet2T<R>& u) { R s = std::sin(u.v), c = std::cos(u.v); return chain(u, s, c, -s); }
template <class R> Jet2T<R> cos(const Jet2T<R>& u) { R s = std::sin(u.v), c = std::cos(u.v); return chain(u, c, -s, -c); }
template <class R> Jet2T<R> tan(const Jet2T<R>& u) { R t = std::tan(u.v), s = R(1) + t * t; return chain(u, t, s, R(2) * t * s); }
template <class R> Jet2T<R> exp(const Jet2T<R>& u) { R e = std::exp(u.v); return chain(u, e, e, e); }
template <class R> Jet2T<R> log(const Jet2T<R>& u) { R w = R(1) / u.v; return chain(u, std::log(u.v), w, -w * w); }
template <class R>
Jet2T<R> sqrt(const Jet2T<R>& u) {
    R s = std::sqrt(u.v);
    return chain(u, s, R(0.5) / s, R(-0.25) / (s * u.v));
}
template <class R> Jet2T<R> sinh(const Jet2T<R>& u) { R s = std::sinh(u.v), c = std::cosh(u.v); return chain(u, s, c, s); }
template <class R> Jet2T<R> cosh(const Jet2T<R>& u) { R s = std::sinh(u.v), c = std::cosh(u.v); return chain(u, c, s, c); }
template <class R>
Jet2T<R> tanh(const Jet2T<R>& u) {
    R t = std::tanh(u.v), s = R(1) - t * t;
    return chain(u, t, s, R(-2) * t * s);
}
template <class R>
Jet2T<R> atan(const Jet2T<R>& u) {
    R w = R(1) / (R(1) + u.v * u.v);
    return chain(u, std::atan(u.v), w, R(-2) * u.v * w * w);
}

/// u^n for integer n; valid for any sign of u (unlike the general power).
template <class R>
Jet2T<R> powi(const Jet2T<R>& u, long long n) {
    if (n == 0) return Jet2T<R>::constant(1, u.dims());
    const R dn = static_cast<R>(n);
    const R f = std::pow(u.v, dn);
    const R f1 = dn * std::pow(u.v, dn - R(1));
    const R f2 = dn * (dn - R(1)) * std::pow(u.v, dn - R(2));
    return chain(u, f, f1, f2);
}

template <class R>
Jet2T<R> pow(const Jet2T<R>& a, const Jet2T<R>& b) {
    // General power via exp(b log a); callers guard the domain (a.v > 0).
    return exp(b * log(a));
}

inline double value(double x) { return x; }
inline long double value(long double x) { return x; }
template <class R> R value(const DualT<R>& x) { return x.v; }
template <class R> R value(const Jet2T<R>& x) { return x.v; }

// Plain real counterparts so generic code can evaluate over double,
// long double, DualT or Jet2T with unqualified calls inside namespace folab.
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double tan(double x) { return std::tan(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double sinh(double x) { return std::sinh(x); }
inline double cosh(double x) { return std::cosh(x); }
inline double tanh(double x) { return std::tanh(x); }
inline double atan(double x) { return std::atan(x); }
inline double inv(double x) { return 1.0 / x; }
inline double powi(double x, long long n) { return std::pow(x, static_cast<double>(n)); }
inline double pow(double a, double b) { return std::pow(a, b); }

inline long double sin(long double x) { return std::sin(x); }
inline long double cos(long double x) { return std::cos(x); }
inline long double tan(long double x) { return std::tan(x); }
inline long double exp(long double x) { return std::exp(x); }
inline long double log(long double x) { return std::log(x); }
inline long double sqrt(long double x) { return std::sqrt(x); }
inline long double sinh(long double x) { return std::sinh(x); }
inline long double cosh(long double x) { return std::cosh(x); }
inline long double tanh(long double x) { return std::tanh(x); }
inline long double atan(long double x) { return std::atan(x); }
inline long double inv(long double x) { return 1.0L / x; }
inline long double powi(long double x, long long n) { return std::pow(x, static_cast<long double>(n)); }
inline long double pow(long double a, long double b) { return std::pow(a, b); }

/// Make a zero scalar with the same seed dimensions as the prototype.
inline double zero_like(double) { return 0.0; }
inline long double zero_like(long double) { return 0.0L; }
template <class R> DualT<R> zero_like(const DualT<R>& p) { return DualT<R>::constant(0, p.dims()); }
template <class R> Jet2T<R> zero_like(const Jet2T<R>& p) { return Jet2T<R>::constant(0, p.dims()); }

/// Make a constant scalar with the same seed dimensions as the prototype.
inline double constant_like(double, double c) { return c; }
inline long double constant_like(long double, double c) { return c; }
template <class R> DualT<R> constant_like(const DualT<R>& p, double c) {
    return DualT<R>::constant(static_cast<R>(c), p.dims());
}
template <class R> Jet2T<R> constant_like(const Jet2T<R>& p, double c) {
    return Jet2T<R>::constant(static_cast<R>(c), p.dims());
}

} // namespace folab
