#pragma once

#include <cmath>
#include <type_traits>

namespace axb {

/// Forward-mode dual number. Nesting Dual<Dual<...>> to depth k and reading
/// the all-epsilons coefficient of f(x + e1 + ... + ek) yields the exact k-th
/// derivative of f at x.
template <class T>
struct Dual {
    using value_type = T;

    T v{};  // value
    T d{};  // derivative part

    Dual() = default;
    Dual(const T& value) : v(value), d(T{}) {}
    Dual(const T& value, const T& deriv) : v(value), d(deriv) {}
};

/// Lift a plain double into (possibly nested) dual space with zero
/// derivative parts.
template <class T>
T dual_scalar(double c) {
    if constexpr (std::is_same_v<T, double>) return c;
    else return T{dual_scalar<typename T::value_type>(c), typename T::value_type{}};
}

template <class T> Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
    return {a.v * b.v, a.v * b.d + a.d * b.v};
}
template <class T> Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    const T q = a.v / b.v;
    return {q, (a.d - q * b.d) / b.v};
}

template <class T> Dual<T> operator+(const Dual<T>& a, double c) { return {a.v + c, a.d}; }
template <class T> Dual<T> operator+(double c, const Dual<T>& a) { return {c + a.v, a.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, double c) { return {a.v - c, a.d}; }
template <class T> Dual<T> operator-(double c, const Dual<T>& a) { return {c - a.v, -a.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, double c) { return {a.v * c, a.d * c}; }
template <class T> Dual<T> operator*(double c, const Dual<T>& a) { return {c * a.v, c * a.d}; }
template <class T> Dual<T> operator/(const Dual<T>& a, double c) { return {a.v / c, a.d / c}; }
template <class T> Dual<T> operator/(double c, const Dual<T>& a) {
    return Dual<T>{dual_scalar<T>(c), T{}} / a;
}

using std::cosh; using std::exp; using std::log; using std::pow; using std::sinh; using std::sqrt;

template <class T> Dual<T> exp(const Dual<T>& a) {
    const T e = exp(a.v);
    return {e, a.d * e};
}
template <class T> Dual<T> log(const Dual<T>& a) { return {log(a.v), a.d / a.v}; }
template <class T> Dual<T> sqrt(const Dual<T>& a) {
    const T r = sqrt(a.v);
    return {r, a.d / (2.0 * r)};
}
template <class T> Dual<T> sinh(const Dual<T>& a) { return {sinh(a.v), a.d * cosh(a.v)}; }
template <class T> Dual<T> cosh(const Dual<T>& a) { return {cosh(a.v), a.d * sinh(a.v)}; }
template <class T> Dual<T> pow(const Dual<T>& a, double p) {
    const T f = pow(a.v, p);
    return {f, a.d * (p * pow(a.v, p - 1.0))};
}

namespace detail {

template <int K>
struct NestedDual {
    using type = Dual<typename NestedDual<K - 1>::type>;
};
template <>
struct NestedDual<0> {
    using type = double;
};

template <int K>
typename NestedDual<K>::type make_const(double c) {
    if constexpr (K == 0) return c;
    else return typename NestedDual<K>::type{detail::make_const<K - 1>(c), detail::make_const<K - 1>(0.0)};
}

// x + e1 + ... + eK
template <int K>
typename NestedDual<K>::type make_seed(double x) {
    if constexpr (K == 0) return x;
    else return typename NestedDual<K>::type{detail::make_seed<K - 1>(x), detail::make_const<K - 1>(1.0)};
}

template <int K>
double corner(const typename NestedDual<K>::type& t) {
    if constexpr (K == 0) return t;
    else return detail::corner<K - 1>(t.d);
}

}  // namespace detail

/// k-th derivative of a generic callable at x, exact to rounding. f must be
/// evaluable on Dual arguments of nesting depth k. Supported k: 0..8.
template <int K, class F>
double nth_derivative(F&& f, double x) {
    static_assert(K >= 0 && K <= 8, "nth_derivative: depth out of range");
    auto t = f(detail::make_seed<K>(x));
    return detail::corner<K>(t);
}

template <class F>
double nth_derivative(F&& f, double x, int k) {
    switch (k) {
        case 0: return nth_derivative<0>(f, x);
        case 1: return nth_derivative<1>(f, x);
        case 2: return nth_derivative<2>(f, x);
        case 3: return nth_derivative<3>(f, x);
        case 4: return nth_derivative<4>(f, x);
        case 5: return nth_derivative<5>(f, x);
        case 6: return nth_derivative<6>(f, x);
        case 7: return nth_derivative<7>(f, x);
        case 8: return nth_derivative<8>(f, x);
        default: throw std::invalid_argument("nth_derivative: order must be in 0..8");
    }
}

}  // namespace axb
