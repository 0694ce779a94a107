#pragma once

// Complex-argument Bessel, Hankel and spherical Bessel functions, plus the
// Airy function on the real line and its negative zeros.
//
// All evaluation happens in long double; the double-returning entry points
// throw OverflowError when the result leaves the double range. The table
// interface keeps long double so that modal formulas can form products like
// j_l(z) h_l(z) for large l and small |z| without intermediate overflow.

#include <complex>
#include <vector>

namespace trapwave {

using Complex = std::complex<double>;
using ComplexL = std::complex<long double>;

/// Bessel order: a non-negative integer or half-integer.
class Order {
public:
    explicit Order(double value);

    static Order integer(int n) { return Order(static_cast<double>(n)); }
    /// l + 1/2, the cylindrical order matching spherical order l.
    static Order half_integer(int ell) { return Order(ell + 0.5); }

    double value() const { return value_; }
    bool is_integer() const { return twice_ % 2 == 0; }
    /// Integer part of the order (n for n, l for l + 1/2).
    int base() const { return twice_ / 2; }

private:
    double value_;
    int twice_;
};

enum class BesselFamily { Cylindrical, Spherical };

/// Values of J/j, Y/y and H^(1)/h^(1) for orders 0..max_order + 1 at a single
/// argument. Cylindrical tables hold integer orders.
struct BesselTable {
    BesselFamily family = BesselFamily::Cylindrical;
    ComplexL z;
    int max_order = 0;
    std::vector<ComplexL> j;
    std::vector<ComplexL> y;
    std::vector<ComplexL> h;

    ComplexL j_prime(int n) const;
    ComplexL y_prime(int n) const;
    ComplexL h_prime(int n) const;
};

/// Builds a table for orders 0..max_order (one extra order is stored for
/// derivatives). z = 0 is allowed only when with_singular is false.
BesselTable bessel_table(BesselFamily family, int max_order, ComplexL z,
                         bool with_singular = true);

/// Only the regular function (J or j) for orders 0..max_order + 1.
std::vector<ComplexL> bessel_j_orders(BesselFamily family, int max_order, ComplexL z);

Complex cyl_bessel_j(Order nu, Complex z);
Complex cyl_bessel_y(Order nu, Complex z);
Complex cyl_hankel1(Order nu, Complex z);
Complex cyl_bessel_j_prime(Order nu, Complex z);
Complex cyl_hankel1_prime(Order nu, Complex z);

Complex sph_bessel(int ell, Complex z);
Complex sph_bessel_y(int ell, Complex z);
Complex sph_hankel1(int ell, Complex z);
Complex sph_bessel_prime(int ell, Complex z);
Complex sph_hankel1_prime(int ell, Complex z);

double airy_ai(double x);
double airy_ai_prime(double x);

/// First `count` zeros of Ai(-x), increasing. count must be in [1, 50].
std::vector<double> airy_neg_zeros(int count);

}  // namespace trapwave
