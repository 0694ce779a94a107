#include "lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace trapwave::detail {

namespace {

void reorthogonalize(Eigen::VectorXcd& w, const std::vector<Eigen::VectorXcd>& basis) {
    // Two passes of classical Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) w -= b.dot(w) * b;
}

double bidiagonal_sigma_max(const std::vector<double>& alpha, const std::vector<double>& beta) {
    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        b(i, i) = alpha[i];
        if (i + 1 < m) b(i, i + 1) = beta[i];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
    return svd.singularValues()(0);
}

}  // namespace

double largest_singular_value(int n, const Operator& apply, const Operator& apply_adjoint,
                              double rel_tol, int max_iter) {
    if (n <= 0) return 0.0;
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = 1.0 + 0.25 * std::sin(1.0 + 0.7 * i);
    v.normalize();

    std::vector<Eigen::VectorXcd> vs{v}, us;
    std::vector<double> alpha, beta;
    Eigen::VectorXcd u(n), w(n);

    apply(v, u);
    double a = u.norm();
    if (a == 0.0) return 0.0;
    u /= a;
    us.push_back(u);
    alpha.push_back(a);

    double sigma = a, previous = 0.0;
    int stable = 0;
    const int limit = std::min(max_iter, n);
    for (int it = 1; it < limit; ++it) {
        apply_adjoint(us.back(), w);
        w -= alpha.back() * vs.back();
        reorthogonalize(w, vs);
        const double b = w.norm();
        if (b <= 1e-14 * sigma) break;
        vs.push_back(w / b);
        beta.push_back(b);

        apply(vs.back(), u);
        u -= b * us.back();
        reorthogonalize(u, us);
        a = u.norm();
        alpha.push_back(a);
        if (a <= 1e-14 * sigma) {
            sigma = bidiagonal_sigma_max(alpha, beta);
            break;
        }
        us.push_back(u / a);

        previous = sigma;
        sigma = bidiagonal_sigma_max(alpha, beta);
        if (std::fabs(sigma - previous) <= rel_tol * sigma) {
            if (++stable >= 2) break;
        } else {
            stable = 0;
        }
    }
    return sigma;
}

}  // namespace trapwave::detail
