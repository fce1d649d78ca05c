#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qpart/layout.hpp"
#include "qpart/pauli.hpp"

namespace qpart {

/// Restricted global unitary: an ordered product of barred factors
/// cos(c_i) I + i sin(c_i) P_i, one per Pauli string P_i.  The factors are
/// unitary for any real angle because P_i is hermitian with P_i^2 = I, so
/// no constraint ties the angles together.  Factor order is significant.
struct RestrictedUnitary {
    std::size_t n_qubits = 0;
    std::vector<PauliString> factors;

    RestrictedUnitary(std::size_t n, std::vector<PauliString> f);

    std::size_t factor_count() const { return factors.size(); }
};

/// One trigonometric factor of an expansion coefficient.  A factor index
/// absent from a tree means the corresponding barred factor contributed
/// cos^2 + sin^2 = 1 (its commutator branch vanished).
enum class FactorKind : std::uint8_t {
    Cos2,          // cos^2(c_i)
    PlusICosSin,   // +i cos(c_i) sin(c_i)
    MinusICosSin,  // -i cos(c_i) sin(c_i)
    Sin2,          // sin^2(c_i)
};

std::string factor_kind_name(FactorKind kind);

/// Symbolic coefficient of one expansion term: base * prod_i f_i(c_i) with
/// f_i one of the four kinds above.  The base absorbs the Hamiltonian
/// coefficient and every phase picked up when normalizing the term's Pauli
/// string, so evaluating a tree at concrete angles is an exact trig
/// product.  Keeping the product symbolic makes the derivative with respect
/// to any angle exact and avoids re-expanding the conjugation at every
/// optimizer step.
class CoefficientTree {
  public:
    CoefficientTree() = default;
    explicit CoefficientTree(std::complex<double> base) : base_(base) {}

    /// Appends a factor; indices must arrive in strictly ascending order.
    void push_factor(std::size_t index, FactorKind kind);

    void scale(std::complex<double> s) { base_ *= s; }
    void set_base(std::complex<double> base) { base_ = base; }

    std::complex<double> base() const { return base_; }
    const std::vector<std::pair<std::uint32_t, FactorKind>>& factors() const {
        return factors_;
    }

    bool depends_on(std::size_t index) const;

    /// base * prod f_i(angles[i]).
    std::complex<double> eval(std::span<const double> angles) const;

    /// Analytic d/d(angles[index]); exactly zero when the tree does not
    /// depend on that index.
    std::complex<double> grad(std::span<const double> angles,
                              std::size_t index) const;

    /// Orders trees by their factor structure (base ignored); used to merge
    /// and deterministically sort terms.
    static int compare_structure(const CoefficientTree& a,
                                 const CoefficientTree& b);

  private:
    std::vector<std::pair<std::uint32_t, FactorKind>> factors_;
    std::complex<double> base_{1.0, 0.0};
};

struct FactoredTerm {
    CoefficientTree coeff;
    std::vector<PauliString> factors;  // one phase-free string per subsystem
};

/// The conjugated observable V' M V written as sum_p d_p(c) (x)_s W_s^p:
/// per-term symbolic coefficients plus partition-restricted operator
/// factors, in a fixed deterministic term order.
struct FactoredObservable {
    PartitionLayout layout;
    std::size_t angle_count = 0;  // length of the angle vector c
    std::vector<FactoredTerm> terms;

    /// Deduplicated non-identity (subsystem, operator) pairs, sorted.
    std::vector<std::pair<std::size_t, PauliString>> operator_pool() const;

    std::string to_json() const;
};

/// Indices i1 < i2 < ... of the factors of v that fail to commute with
/// target or with a previously retained factor.  Every omitted factor
/// commutes with target and with all retained factors, so it cancels
/// against its adjoint in the conjugation sandwich.
std::vector<std::size_t> prune_factors(const RestrictedUnitary& v,
                                       const PauliString& target);

struct ConjugateOptions {
    /// Expansion abort threshold, counted per source term and in total.
    std::size_t term_cap = 1'000'000;
    /// Terms whose merged base falls below this magnitude are dropped.
    double drop_tolerance = 1e-12;
};

/// Per-source-term expansion statistics (diagnostics for budget reports
/// and the 2^(2K) bound checks).
struct ConjugateReport {
    struct SourceTerm {
        PauliString source;
        std::size_t retained_factors = 0;  // K for this term
        std::size_t expansion_terms = 0;   // always <= 4^K
    };
    std::vector<SourceTerm> sources;
};

/// Expands V' M V term by term: each Hamiltonian term is pruned to its K
/// non-commuting factors and conjugated by those only, splitting into at
/// most four branches per factor (cos^2, +-i cos sin, sin^2) and passing
/// straight through factors that commute with the current string.  Like
/// terms (same factors and same tree structure) are merged.
FactoredObservable conjugate_observable(const RestrictedUnitary& v,
                                        const Observable& m,
                                        const PartitionLayout& layout,
                                        const ConjugateOptions& options = {},
                                        ConjugateReport* report = nullptr);

}  // namespace qpart
