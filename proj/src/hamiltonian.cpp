#include "qpart/hamiltonian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpart/random.hpp"

namespace qpart {

Observable build_tfim(const TfimSpec& spec) {
    if (spec.sites < 2) {
        throw std::invalid_argument("TFIM needs at least two sites");
    }
    Observable h(spec.sites);
    for (std::size_t i = 0; i < spec.sites; ++i) {
        PauliString bond(spec.sites);
        bond.set_op(i, Pauli::X);
        bond.set_op((i + 1) % spec.sites, Pauli::X);
        h.add(bond, -spec.coupling);
        h.add(PauliString::single(spec.sites, i, Pauli::Z), -spec.field);
    }
    return h;
}

namespace {

/// One Pauli term precompiled for action on a real amplitude vector:
/// out[b ^ flip] += weight * (-1)^popcount(b & sign_mask) * in[b].
/// Real action requires an X/Z-only string with real phase, which holds
/// for every TFIM term.
struct RealPauliAction {
    std::uint64_t flip = 0;
    std::uint64_t sign_mask = 0;
    double weight = 0.0;
};

std::vector<RealPauliAction> compile_real_actions(const Observable& h) {
    std::vector<RealPauliAction> actions;
    for (const auto& [p, c] : h.sorted_terms()) {
        if (std::abs(c.imag()) > 0.0) {
            throw std::invalid_argument("Hamiltonian coefficients must be real");
        }
        const std::uint64_t x = p.x_words()[0];
        const std::uint64_t z = p.z_words()[0];
        if ((x & z) != 0 || p.phase_exponent() % 2 != 0) {
            throw std::invalid_argument(
                "term is not real in the computational basis: " + p.str());
        }
        const double sign = p.phase_exponent() == 2 ? -1.0 : 1.0;
        actions.push_back({x, z, sign * c.real()});
    }
    return actions;
}

void apply_actions(const std::vector<RealPauliAction>& actions,
                   const std::vector<double>& in, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t dim = in.size();
    for (const RealPauliAction& a : actions) {
        if (a.flip == 0) {
            for (std::size_t b = 0; b < dim; ++b) {
                const double s =
                    (std::popcount(b & a.sign_mask) & 1) != 0 ? -1.0 : 1.0;
                out[b] += a.weight * s * in[b];
            }
        } else {
            for (std::size_t b = 0; b < dim; ++b) {
                const double s =
                    (std::popcount(b & a.sign_mask) & 1) != 0 ? -1.0 : 1.0;
                out[b ^ a.flip] += a.weight * s * in[b];
            }
        }
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

double vec_norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

/// Number of eigenvalues of the symmetric tridiagonal (alpha, beta) that
/// are strictly below x (Sturm sequence count).
std::size_t sturm_count(const std::vector<double>& alpha,
                        const std::vector<double>& beta, double x) {
    std::size_t count = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const double beta_sq = i == 0 ? 0.0 : beta[i - 1] * beta[i - 1];
        d = alpha[i] - x - beta_sq / d;
        if (d == 0.0) {
            d = -1e-300;
        }
        if (d < 0.0) {
            ++count;
        }
    }
    return count;
}

double tridiag_smallest_eigenvalue(const std::vector<double>& alpha,
                                   const std::vector<double>& beta) {
    double radius = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        double r = std::abs(alpha[i]);
        if (i > 0) {
            r += std::abs(beta[i - 1]);
        }
        if (i + 1 < alpha.size()) {
            r += std::abs(beta[i]);
        }
        radius = std::max(radius, r);
    }
    double lo = -radius - 1.0;
    double hi = radius + 1.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo));
         ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(alpha, beta, mid) >= 1) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Eigenvector of the tridiagonal at an already-converged eigenvalue via
/// inverse iteration.
std::vector<double> tridiag_eigenvector(const std::vector<double>& alpha,
                                        const std::vector<double>& beta,
                                        double lambda) {
    const std::size_t k = alpha.size();
    std::vector<double> y(k, 1.0 / std::sqrt(static_cast<double>(k)));
    const double shift = lambda - 1e-12 * (1.0 + std::abs(lambda));
    for (int pass = 0; pass < 3; ++pass) {
        // Thomas solve of (T - shift I) x = y.
        std::vector<double> c(k, 0.0);
        std::vector<double> d(k, 0.0);
        double denom = alpha[0] - shift;
        if (std::abs(denom) < 1e-300) {
            denom = 1e-300;
        }
        c[0] = k > 1 ? beta[0] / denom : 0.0;
        d[0] = y[0] / denom;
        for (std::size_t i = 1; i < k; ++i) {
            denom = alpha[i] - shift - beta[i - 1] * c[i - 1];
            if (std::abs(denom) < 1e-300) {
                denom = 1e-300;
            }
            c[i] = i + 1 < k ? beta[i] / denom : 0.0;
            d[i] = (y[i] - beta[i - 1] * d[i - 1]) / denom;
        }
        y[k - 1] = d[k - 1];
        for (std::size_t i = k - 1; i-- > 0;) {
            y[i] = d[i] - c[i] * y[i + 1];
        }
        const double n = std::sqrt(dot(y, y));
        for (double& v : y) {
            v /= n;
        }
    }
    return y;
}

}  // namespace

double exact_ground_energy(const TfimSpec& spec,
                           const GroundStateOptions& options) {
    if (spec.sites > 20) {
        throw std::invalid_argument(
            "iterative oracle supports at most 20 sites");
    }
    const Observable h = build_tfim(spec);
    const auto actions = compile_real_actions(h);
    double coeff_norm = 0.0;
    for (const auto& a : actions) {
        coeff_norm += std::abs(a.weight);
    }

    const std::size_t dim = std::size_t{1} << spec.sites;
    std::size_t max_basis = options.max_basis;
    if (max_basis == 0) {
        const std::size_t budget = (std::size_t{512} << 20) / (8 * dim);
        max_basis = std::clamp<std::size_t>(budget, 20, 300);
    }

    Rng rng(options.seed);
    std::vector<double> v(dim);
    for (double& x : v) {
        x = rng.uniform(-1.0, 1.0);
    }
    {
        const double n = vec_norm(v);
        for (double& x : v) {
            x /= n;
        }
    }

    std::vector<double> w(dim);
    double best = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;

    while (iterations < options.max_iterations) {
        std::vector<std::vector<double>> basis;
        std::vector<double> alpha;
        std::vector<double> beta;
        basis.push_back(v);

        double previous = std::numeric_limits<double>::infinity();
        bool breakdown = false;
        while (basis.size() <= max_basis &&
               iterations < options.max_iterations) {
            ++iterations;
            apply_actions(actions, basis.back(), w);
            double a = dot(basis.back(), w);
            alpha.push_back(a);
            for (std::size_t i = 0; i < dim; ++i) {
                w[i] -= a * basis.back()[i];
            }
            if (basis.size() > 1) {
                const auto& prev = basis[basis.size() - 2];
                const double b = beta.back();
                for (std::size_t i = 0; i < dim; ++i) {
                    w[i] -= b * prev[i];
                }
            }
            // Full reorthogonalization keeps the basis numerically
            // orthogonal; without it converged directions reappear.
            for (const auto& u : basis) {
                const double proj = dot(u, w);
                for (std::size_t i = 0; i < dim; ++i) {
                    w[i] -= proj * u[i];
                }
            }
            const double b = vec_norm(w);
            const double lambda = tridiag_smallest_eigenvalue(alpha, beta);
            const bool stalled =
                std::abs(lambda - previous) <=
                0.25 * options.tolerance * std::max(1.0, std::abs(lambda));
            previous = lambda;
            if (b < 1e-13 * coeff_norm) {
                breakdown = true;  // exact invariant subspace
            }
            if (breakdown || stalled || basis.size() == max_basis) {
                const auto y = tridiag_eigenvector(alpha, beta, lambda);
                std::vector<double> ritz(dim, 0.0);
                for (std::size_t j = 0; j < basis.size(); ++j) {
                    for (std::size_t i = 0; i < dim; ++i) {
                        ritz[i] += y[j] * basis[j][i];
                    }
                }
                const double rn = vec_norm(ritz);
                for (double& x : ritz) {
                    x /= rn;
                }
                apply_actions(actions, ritz, w);
                double num = dot(ritz, w);
                for (std::size_t i = 0; i < dim; ++i) {
                    w[i] -= num * ritz[i];
                }
                best = num;
                residual = vec_norm(w);
                if (residual <= options.tolerance * coeff_norm) {
                    return best;
                }
                v = std::move(ritz);  // restart from the Ritz vector
                break;
            }
            beta.push_back(b);
            for (double& x : w) {
                x /= b;
            }
            basis.push_back(w);
        }
    }
    throw std::runtime_error(
        "ground-state iteration did not converge after " +
        std::to_string(iterations) + " iterations; residual " +
        std::to_string(residual));
}

double free_fermion_ground_energy(const TfimSpec& spec) {
    if (spec.sites < 2 || spec.sites % 2 != 0) {
        throw std::invalid_argument(
            "free-fermion formula implemented for even site counts only");
    }
    const double j = spec.coupling;
    const double h = spec.field;
    double energy = 0.0;
    for (std::size_t m = 1; m <= spec.sites / 2; ++m) {
        const double k = (2.0 * static_cast<double>(m) - 1.0) *
                         std::numbers::pi / static_cast<double>(spec.sites);
        energy -= 2.0 * std::sqrt(j * j + h * h - 2.0 * j * h * std::cos(k));
    }
    return energy;
}

}  // namespace qpart
