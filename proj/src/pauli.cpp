#include "qpart/pauli.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qpart {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t n_qubits) {
    return (n_qubits + kWordBits - 1) / kWordBits;
}

void check_same_size(const PauliString& a, const PauliString& b) {
    if (a.n_qubits() != b.n_qubits()) {
        throw std::invalid_argument(
            "PauliString size mismatch: " + std::to_string(a.n_qubits()) +
            " vs " + std::to_string(b.n_qubits()));
    }
}

std::size_t hash_mix(std::size_t seed, std::uint64_t v) {
    seed ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (seed << 6) +
            (seed >> 2);
    return seed;
}

}  // namespace

char pauli_char(Pauli p) {
    switch (p) {
        case Pauli::I: return 'I';
        case Pauli::X: return 'X';
        case Pauli::Y: return 'Y';
        case Pauli::Z: return 'Z';
    }
    throw std::invalid_argument("invalid Pauli value");
}

Pauli pauli_from_char(char c) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
        case 'I': return Pauli::I;
        case 'X': return Pauli::X;
        case 'Y': return Pauli::Y;
        case 'Z': return Pauli::Z;
    }
    throw std::invalid_argument(std::string("invalid Pauli letter '") + c +
                                "'");
}

PauliString::PauliString(std::size_t n_qubits)
    : n_qubits_(n_qubits),
      x_(word_count(n_qubits), 0),
      z_(word_count(n_qubits), 0) {
    if (n_qubits == 0) {
        throw std::invalid_argument("PauliString needs at least one qubit");
    }
}

PauliString PauliString::single(std::size_t n_qubits, std::size_t qubit,
                                Pauli op) {
    PauliString p(n_qubits);
    p.set_op(qubit, op);
    return p;
}

PauliString PauliString::from_ops(std::size_t n_qubits,
                                  std::span<const Pauli> ops,
                                  int phase_exponent) {
    if (ops.size() != n_qubits) {
        throw std::invalid_argument("ops length must equal n_qubits");
    }
    PauliString p(n_qubits);
    for (std::size_t q = 0; q < n_qubits; ++q) {
        p.set_op(q, ops[q]);
    }
    p.set_phase_exponent(phase_exponent);
    return p;
}

PauliString PauliString::parse(std::string_view text, std::size_t n_qubits) {
    PauliString p(n_qubits);
    std::istringstream in{std::string(text)};
    std::string token;
    bool first = true;
    while (in >> token) {
        if (first) {
            first = false;
            if (token == "-") {
                p.set_phase_exponent(2);
                continue;
            }
            if (token == "i" || token == "+i") {
                p.set_phase_exponent(1);
                continue;
            }
            if (token == "-i") {
                p.set_phase_exponent(3);
                continue;
            }
        }
        if (token == "I") {
            continue;
        }
        const Pauli op = pauli_from_char(token[0]);
        std::size_t index = 0;
        const auto* begin = token.data() + 1;
        const auto* end = token.data() + token.size();
        auto [ptr, ec] = std::from_chars(begin, end, index);
        if (ec != std::errc() || ptr != end || index == 0 ||
            index > n_qubits) {
            throw std::invalid_argument("bad Pauli token '" + token +
                                        "' for " + std::to_string(n_qubits) +
                                        " qubits");
        }
        if (p.op(index - 1) != Pauli::I) {
            throw std::invalid_argument("qubit " + std::to_string(index) +
                                        " assigned twice in '" +
                                        std::string(text) + "'");
        }
        p.set_op(index - 1, op);
    }
    return p;
}

Pauli PauliString::op(std::size_t qubit) const {
    const std::size_t w = qubit / kWordBits;
    const std::uint64_t bit = 1ull << (qubit % kWordBits);
    const bool x = (x_[w] & bit) != 0;
    const bool z = (z_[w] & bit) != 0;
    if (x && z) return Pauli::Y;
    if (x) return Pauli::X;
    if (z) return Pauli::Z;
    return Pauli::I;
}

void PauliString::set_op(std::size_t qubit, Pauli op) {
    if (qubit >= n_qubits_) {
        throw std::invalid_argument("qubit index out of range");
    }
    const std::size_t w = qubit / kWordBits;
    const std::uint64_t bit = 1ull << (qubit % kWordBits);
    x_[w] &= ~bit;
    z_[w] &= ~bit;
    if (op == Pauli::X || op == Pauli::Y) {
        x_[w] |= bit;
    }
    if (op == Pauli::Z || op == Pauli::Y) {
        z_[w] |= bit;
    }
}

std::complex<double> PauliString::phase() const {
    static const std::complex<double> table[4] = {
        {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    return table[phase_];
}

void PauliString::set_phase_exponent(int k) {
    phase_ = static_cast<std::uint8_t>(((k % 4) + 4) % 4);
}

PauliString PauliString::phaseless() const {
    PauliString p = *this;
    p.phase_ = 0;
    return p;
}

bool PauliString::is_identity_ops() const {
    for (std::size_t w = 0; w < x_.size(); ++w) {
        if ((x_[w] | z_[w]) != 0) {
            return false;
        }
    }
    return true;
}

std::size_t PauliString::weight() const {
    std::size_t count = 0;
    for (std::size_t w = 0; w < x_.size(); ++w) {
        count += std::popcount(x_[w] | z_[w]);
    }
    return count;
}

bool PauliString::commutes_with(const PauliString& other) const {
    check_same_size(*this, other);
    // Strings commute iff the number of sites with distinct non-identity
    // operators is even; per site that is the symplectic form x1*z2 ^ z1*x2.
    unsigned parity = 0;
    for (std::size_t w = 0; w < x_.size(); ++w) {
        parity += std::popcount(x_[w] & other.z_[w]);
        parity += std::popcount(z_[w] & other.x_[w]);
    }
    return (parity & 1u) == 0;
}

PauliString operator*(const PauliString& a, const PauliString& b) {
    check_same_size(a, b);
    PauliString out(a.n_qubits_);
    // Per site, with the i^(x&z) X^x Z^z encoding, the product's phase
    // exponent is x1*z1 + x2*z2 + 2*z1*x2 - (x1^x2)*(z1^z2) mod 4; the sums
    // are gathered with popcounts across whole words.
    std::uint64_t k = static_cast<std::uint64_t>(a.phase_ + b.phase_);
    for (std::size_t w = 0; w < out.x_.size(); ++w) {
        const std::uint64_t ax = a.x_[w], az = a.z_[w];
        const std::uint64_t bx = b.x_[w], bz = b.z_[w];
        k += static_cast<std::uint64_t>(std::popcount(ax & az));
        k += static_cast<std::uint64_t>(std::popcount(bx & bz));
        k += 2ull * static_cast<std::uint64_t>(std::popcount(az & bx));
        k += 3ull * static_cast<std::uint64_t>(
                        std::popcount((ax ^ bx) & (az ^ bz)));
        out.x_[w] = ax ^ bx;
        out.z_[w] = az ^ bz;
    }
    out.phase_ = static_cast<std::uint8_t>(k & 3ull);
    return out;
}

bool PauliString::ops_equal(const PauliString& other) const {
    return n_qubits_ == other.n_qubits_ && x_ == other.x_ && z_ == other.z_;
}

bool PauliString::operator==(const PauliString& other) const {
    return ops_equal(other) && phase_ == other.phase_;
}

bool PauliString::less(const PauliString& a, const PauliString& b) {
    if (a.n_qubits_ != b.n_qubits_) {
        return a.n_qubits_ < b.n_qubits_;
    }
    for (std::size_t q = 0; q < a.n_qubits_; ++q) {
        const auto oa = static_cast<std::uint8_t>(a.op(q));
        const auto ob = static_cast<std::uint8_t>(b.op(q));
        if (oa != ob) {
            return oa < ob;
        }
    }
    return a.phase_ < b.phase_;
}

std::string PauliString::str() const {
    std::string out;
    switch (phase_) {
        case 1: out = "i "; break;
        case 2: out = "- "; break;
        case 3: out = "-i "; break;
        default: break;
    }
    bool any = false;
    for (std::size_t q = 0; q < n_qubits_; ++q) {
        const Pauli p = op(q);
        if (p == Pauli::I) {
            continue;
        }
        if (any) {
            out += ' ';
        }
        out += pauli_char(p);
        out += std::to_string(q + 1);
        any = true;
    }
    if (!any) {
        out += 'I';
    }
    return out;
}

std::size_t PauliString::hash() const {
    std::size_t seed = hash_mix(0, n_qubits_);
    for (std::size_t w = 0; w < x_.size(); ++w) {
        seed = hash_mix(seed, x_[w]);
        seed = hash_mix(seed, z_[w]);
    }
    return hash_mix(seed, phase_);
}

Observable::Observable(std::size_t n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits == 0) {
        throw std::invalid_argument("Observable needs at least one qubit");
    }
}

void Observable::add(const PauliString& p, std::complex<double> coeff) {
    if (p.n_qubits() != n_qubits_) {
        throw std::invalid_argument("term size does not match observable");
    }
    terms_[p.phaseless()] += coeff * p.phase();
}

std::complex<double> Observable::coefficient(const PauliString& p) const {
    const auto it = terms_.find(p.phaseless());
    if (it == terms_.end()) {
        return {0.0, 0.0};
    }
    return it->second * std::conj(p.phase());
}

Observable& Observable::simplify(double drop_tolerance) {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) < drop_tolerance) {
            it = terms_.erase(it);
        } else {
            ++it;
        }
    }
    return *this;
}

double Observable::max_imaginary_part() const {
    double worst = 0.0;
    for (const auto& [p, c] : terms_) {
        worst = std::max(worst, std::abs(c.imag()));
    }
    return worst;
}

std::vector<std::pair<PauliString, std::complex<double>>>
Observable::sorted_terms() const {
    std::vector<std::pair<PauliString, std::complex<double>>> out(
        terms_.begin(), terms_.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return PauliString::less(a.first, b.first);
    });
    return out;
}

std::string Observable::to_json() const {
    nlohmann::json j;
    j["n_qubits"] = n_qubits_;
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [p, c] : sorted_terms()) {
        terms.push_back({{"coefficient", {c.real(), c.imag()}},
                         {"string", p.str()}});
    }
    j["terms"] = std::move(terms);
    return j.dump(2);
}

Observable Observable::from_json(std::string_view text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    Observable obs(j.at("n_qubits").get<std::size_t>());
    for (const auto& term : j.at("terms")) {
        const auto& c = term.at("coefficient");
        obs.add(PauliString::parse(term.at("string").get<std::string>(),
                                   obs.n_qubits()),
                {c.at(0).get<double>(), c.at(1).get<double>()});
    }
    return obs;
}

}  // namespace qpart
