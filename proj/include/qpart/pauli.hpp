#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace qpart {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_char(Pauli p);
Pauli pauli_from_char(char c);

/// Tensor product of single-qubit Pauli operators over n qubits with a
/// tracked global phase in {1, i, -1, -i}.
///
/// Each qubit's operator is stored as an (x, z) bit pair packed into 64-bit
/// words: I=(0,0), X=(1,0), Y=(1,1), Z=(0,1).  The operator encoded by a
/// pair is i^(x&z) * X^x * Z^z, which makes Y=(1,1) the genuine Pauli-Y.
/// Products and commutation checks then reduce to word-wide bit operations
/// plus popcounts, with the phase tracked as an exponent of i modulo 4.
class PauliString {
  public:
    /// Identity string with phase +1.
    explicit PauliString(std::size_t n_qubits);

    static PauliString identity(std::size_t n_qubits) {
        return PauliString(n_qubits);
    }

    /// Single non-identity operator on one qubit, identity elsewhere.
    static PauliString single(std::size_t n_qubits, std::size_t qubit,
                              Pauli op);

    static PauliString from_ops(std::size_t n_qubits,
                                std::span<const Pauli> ops,
                                int phase_exponent = 0);

    /// Parses the text form used in config files and dumps: operators with
    /// 1-based qubit indices, e.g. "X1 Z3"; "I" for the identity; optional
    /// leading phase token "-", "i" or "-i".
    static PauliString parse(std::string_view text, std::size_t n_qubits);

    std::size_t n_qubits() const { return n_qubits_; }

    Pauli op(std::size_t qubit) const;
    void set_op(std::size_t qubit, Pauli op);

    /// Phase exponent k with phase = i^k, k in {0,1,2,3}.
    int phase_exponent() const { return phase_; }
    std::complex<double> phase() const;
    void set_phase_exponent(int k);

    /// Copy with phase reset to +1.
    PauliString phaseless() const;

    /// True when every site is the identity (phase ignored).
    bool is_identity_ops() const;

    /// Number of non-identity sites.
    std::size_t weight() const;

    bool commutes_with(const PauliString& other) const;

    /// Exact operator product with accumulated phase.
    friend PauliString operator*(const PauliString& a, const PauliString& b);

    /// Equality of operator content ignoring phase.
    bool ops_equal(const PauliString& other) const;
    bool operator==(const PauliString& other) const;

    /// Deterministic total order: n_qubits, then per-qubit ops with
    /// I < X < Y < Z starting from qubit 0, then phase exponent.
    static bool less(const PauliString& a, const PauliString& b);

    std::string str() const;

    std::size_t hash() const;

    std::span<const std::uint64_t> x_words() const { return x_; }
    std::span<const std::uint64_t> z_words() const { return z_; }

  private:
    std::size_t n_qubits_;
    std::vector<std::uint64_t> x_;
    std::vector<std::uint64_t> z_;
    std::uint8_t phase_ = 0;
};

inline bool commutes(const PauliString& a, const PauliString& b) {
    return a.commutes_with(b);
}

struct PauliStringHash {
    std::size_t operator()(const PauliString& p) const { return p.hash(); }
};

struct PauliStringLess {
    bool operator()(const PauliString& a, const PauliString& b) const {
        return PauliString::less(a, b);
    }
};

/// Complex-weighted sum of Pauli strings on a fixed qubit count.  Keys are
/// phase-normalized: any phase on an added string is folded into its
/// coefficient, so merging like terms is a plain map lookup.
class Observable {
  public:
    static constexpr double kDefaultDropTolerance = 1e-12;

    explicit Observable(std::size_t n_qubits);

    std::size_t n_qubits() const { return n_qubits_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    /// Adds coeff * p, accumulating onto an existing like term.
    void add(const PauliString& p, std::complex<double> coeff = 1.0);

    /// Coefficient of the phase-normalized form of p (0 if absent).
    std::complex<double> coefficient(const PauliString& p) const;

    /// Drops terms with |coefficient| below the tolerance.
    Observable& simplify(double drop_tolerance = kDefaultDropTolerance);

    /// Largest |imag(coefficient)| over all terms.
    double max_imaginary_part() const;

    /// Terms in the deterministic PauliString order.
    std::vector<std::pair<PauliString, std::complex<double>>> sorted_terms()
        const;

    const std::unordered_map<PauliString, std::complex<double>,
                             PauliStringHash>&
    terms() const {
        return terms_;
    }

    std::string to_json() const;
    static Observable from_json(std::string_view text);

  private:
    std::size_t n_qubits_;
    std::unordered_map<PauliString, std::complex<double>, PauliStringHash>
        terms_;
};

}  // namespace qpart
