#include "qpart/conjugate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "qpart/parallel.hpp"

namespace qpart {

RestrictedUnitary::RestrictedUnitary(std::size_t n,
                                     std::vector<PauliString> f)
    : n_qubits(n), factors(std::move(f)) {
    for (const PauliString& p : factors) {
        if (p.n_qubits() != n_qubits) {
            throw std::invalid_argument(
                "unitary factor qubit count does not match");
        }
        if (p.phase_exponent() % 2 != 0) {
            throw std::invalid_argument(
                "unitary factor must be hermitian (phase +-1): " + p.str());
        }
    }
}

std::string factor_kind_name(FactorKind kind) {
    switch (kind) {
        case FactorKind::Cos2: return "cos2";
        case FactorKind::PlusICosSin: return "+icossin";
        case FactorKind::MinusICosSin: return "-icossin";
        case FactorKind::Sin2: return "sin2";
    }
    throw std::invalid_argument("invalid FactorKind");
}

void CoefficientTree::push_factor(std::size_t index, FactorKind kind) {
    if (!factors_.empty() && factors_.back().first >= index) {
        throw std::invalid_argument("tree factor indices must be ascending");
    }
    factors_.emplace_back(static_cast<std::uint32_t>(index), kind);
}

bool CoefficientTree::depends_on(std::size_t index) const {
    for (const auto& [i, kind] : factors_) {
        if (i == index) {
            return true;
        }
    }
    return false;
}

namespace {

double kind_value(FactorKind kind, double c, double s,
                  std::complex<double>& phase) {
    switch (kind) {
        case FactorKind::Cos2: return c * c;
        case FactorKind::Sin2: return s * s;
        case FactorKind::PlusICosSin:
            phase *= std::complex<double>{0.0, 1.0};
            return c * s;
        case FactorKind::MinusICosSin:
            phase *= std::complex<double>{0.0, -1.0};
            return c * s;
    }
    return 0.0;
}

// d/dc of the four kinds: cos^2 -> -2 cos sin, sin^2 -> 2 cos sin,
// +-i cos sin -> +-i (cos^2 - sin^2).
double kind_derivative(FactorKind kind, double c, double s,
                       std::complex<double>& phase) {
    switch (kind) {
        case FactorKind::Cos2: return -2.0 * c * s;
        case FactorKind::Sin2: return 2.0 * c * s;
        case FactorKind::PlusICosSin:
            phase *= std::complex<double>{0.0, 1.0};
            return c * c - s * s;
        case FactorKind::MinusICosSin:
            phase *= std::complex<double>{0.0, -1.0};
            return c * c - s * s;
    }
    return 0.0;
}

}  // namespace

std::complex<double> CoefficientTree::eval(
    std::span<const double> angles) const {
    std::complex<double> phase = base_;
    double magnitude = 1.0;
    for (const auto& [index, kind] : factors_) {
        if (index >= angles.size()) {
            throw std::invalid_argument("angle vector too short for tree");
        }
        const double c = std::cos(angles[index]);
        const double s = std::sin(angles[index]);
        magnitude *= kind_value(kind, c, s, phase);
    }
    return phase * magnitude;
}

std::complex<double> CoefficientTree::grad(std::span<const double> angles,
                                           std::size_t index) const {
    if (!depends_on(index)) {
        return {0.0, 0.0};
    }
    std::complex<double> phase = base_;
    double magnitude = 1.0;
    for (const auto& [i, kind] : factors_) {
        if (i >= angles.size()) {
            throw std::invalid_argument("angle vector too short for tree");
        }
        const double c = std::cos(angles[i]);
        const double s = std::sin(angles[i]);
        magnitude *= (i == index) ? kind_derivative(kind, c, s, phase)
                                  : kind_value(kind, c, s, phase);
    }
    return phase * magnitude;
}

int CoefficientTree::compare_structure(const CoefficientTree& a,
                                       const CoefficientTree& b) {
    const std::size_t n = std::min(a.factors_.size(), b.factors_.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a.factors_[i].first != b.factors_[i].first) {
            return a.factors_[i].first < b.factors_[i].first ? -1 : 1;
        }
        const auto ka = static_cast<std::uint8_t>(a.factors_[i].second);
        const auto kb = static_cast<std::uint8_t>(b.factors_[i].second);
        if (ka != kb) {
            return ka < kb ? -1 : 1;
        }
    }
    if (a.factors_.size() != b.factors_.size()) {
        return a.factors_.size() < b.factors_.size() ? -1 : 1;
    }
    return 0;
}

std::vector<std::pair<std::size_t, PauliString>>
FactoredObservable::operator_pool() const {
    std::vector<std::pair<std::size_t, PauliString>> pool;
    for (const FactoredTerm& term : terms) {
        for (std::size_t s = 0; s < term.factors.size(); ++s) {
            if (!term.factors[s].is_identity_ops()) {
                pool.emplace_back(s, term.factors[s]);
            }
        }
    }
    std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) {
            return a.first < b.first;
        }
        return PauliString::less(a.second, b.second);
    });
    pool.erase(std::unique(pool.begin(), pool.end(),
                           [](const auto& a, const auto& b) {
                               return a.first == b.first &&
                                      a.second == b.second;
                           }),
               pool.end());
    return pool;
}

std::string FactoredObservable::to_json() const {
    nlohmann::json j;
    j["subsystems"] = layout.sizes();
    j["angle_count"] = angle_count;
    nlohmann::json terms_json = nlohmann::json::array();
    for (const FactoredTerm& term : terms) {
        nlohmann::json t;
        t["base"] = {term.coeff.base().real(), term.coeff.base().imag()};
        nlohmann::json factors_json = nlohmann::json::object();
        for (const auto& [index, kind] : term.coeff.factors()) {
            factors_json[std::to_string(index + 1)] = factor_kind_name(kind);
        }
        t["coefficient"] = std::move(factors_json);
        nlohmann::json strings = nlohmann::json::array();
        for (const PauliString& f : term.factors) {
            strings.push_back(f.str());
        }
        t["factors"] = std::move(strings);
        terms_json.push_back(std::move(t));
    }
    j["terms"] = std::move(terms_json);
    return j.dump(2);
}

std::vector<std::size_t> prune_factors(const RestrictedUnitary& v,
                                       const PauliString& target) {
    if (target.n_qubits() != v.n_qubits) {
        throw std::invalid_argument("target qubit count does not match");
    }
    std::vector<std::size_t> retained;
    for (std::size_t i = 0; i < v.factors.size(); ++i) {
        const PauliString& p = v.factors[i];
        bool keep = !p.commutes_with(target);
        for (std::size_t j : retained) {
            if (keep) {
                break;
            }
            keep = !p.commutes_with(v.factors[j]);
        }
        if (keep) {
            retained.push_back(i);
        }
    }
    return retained;
}

namespace {

struct WorkTerm {
    PauliString string;  // current conjugated string, phase carried along
    CoefficientTree tree;
};

struct MergeKey {
    std::vector<PauliString> factors;
    CoefficientTree tree;  // base ignored in comparisons

    bool operator<(const MergeKey& other) const {
        const std::size_t n = std::min(factors.size(), other.factors.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!(factors[i] == other.factors[i])) {
                return PauliString::less(factors[i], other.factors[i]);
            }
        }
        if (factors.size() != other.factors.size()) {
            return factors.size() < other.factors.size();
        }
        return CoefficientTree::compare_structure(tree, other.tree) < 0;
    }
};

std::vector<WorkTerm> expand_source_term(const RestrictedUnitary& v,
                                         const PauliString& source,
                                         const std::vector<std::size_t>& keep,
                                         std::size_t term_cap) {
    std::vector<WorkTerm> terms;
    terms.push_back({source, CoefficientTree{}});
    for (const std::size_t i : keep) {
        const PauliString& p = v.factors[i];
        std::vector<WorkTerm> next;
        next.reserve(terms.size() * 4);
        for (WorkTerm& t : terms) {
            if (t.string.commutes_with(p)) {
                // P' X P = X when [X, P] = 0: the cos^2 and sin^2 branches
                // merge and the cross terms cancel, so the factor is absent
                // from this term's tree.
                next.push_back(std::move(t));
                continue;
            }
            WorkTerm cos2{t.string, t.tree};
            cos2.tree.push_factor(i, FactorKind::Cos2);
            next.push_back(std::move(cos2));

            WorkTerm plus{t.string * p, t.tree};
            plus.tree.push_factor(i, FactorKind::PlusICosSin);
            next.push_back(std::move(plus));

            WorkTerm minus{p * t.string, t.tree};
            minus.tree.push_factor(i, FactorKind::MinusICosSin);
            next.push_back(std::move(minus));

            WorkTerm sin2{p * t.string * p, t.tree};
            sin2.tree.push_factor(i, FactorKind::Sin2);
            next.push_back(std::move(sin2));
        }
        terms = std::move(next);
        if (terms.size() > term_cap) {
            throw std::runtime_error(
                "conjugation expansion of " + source.str() + " exceeds the " +
                std::to_string(term_cap) + "-term cap (K=" +
                std::to_string(keep.size()) + ")");
        }
    }
    return terms;
}

}  // namespace

FactoredObservable conjugate_observable(const RestrictedUnitary& v,
                                        const Observable& m,
                                        const PartitionLayout& layout,
                                        const ConjugateOptions& options,
                                        ConjugateReport* report) {
    if (v.n_qubits != m.n_qubits() || v.n_qubits != layout.n_qubits()) {
        throw std::invalid_argument(
            "unitary, observable and layout qubit counts must agree");
    }

    const auto sources = m.sorted_terms();
    std::vector<std::vector<WorkTerm>> expanded(sources.size());
    std::vector<std::size_t> retained_counts(sources.size(), 0);
    parallel_for(0, sources.size(), [&](std::size_t idx) {
        const auto keep = prune_factors(v, sources[idx].first);
        retained_counts[idx] = keep.size();
        expanded[idx] = expand_source_term(v, sources[idx].first, keep,
                                           options.term_cap);
    });

    if (report != nullptr) {
        report->sources.clear();
        for (std::size_t idx = 0; idx < sources.size(); ++idx) {
            report->sources.push_back({sources[idx].first,
                                       retained_counts[idx],
                                       expanded[idx].size()});
        }
    }

    std::size_t total = 0;
    std::size_t worst = 0;
    for (std::size_t idx = 0; idx < sources.size(); ++idx) {
        total += expanded[idx].size();
        if (expanded[idx].size() > expanded[worst].size()) {
            worst = idx;
        }
    }
    if (total > options.term_cap) {
        throw std::runtime_error(
            "conjugated observable has " + std::to_string(total) +
            " terms, above the " + std::to_string(options.term_cap) +
            "-term cap; largest source " + sources[worst].first.str() +
            " (K=" + std::to_string(retained_counts[worst]) + ")");
    }

    // Deterministic merge: keyed by (restricted factors, tree structure),
    // accumulating lambda_m times the string's normalization phase.
    std::map<MergeKey, std::complex<double>> merged;
    for (std::size_t idx = 0; idx < sources.size(); ++idx) {
        const std::complex<double> lambda = sources[idx].second;
        for (const WorkTerm& t : expanded[idx]) {
            MergeKey key{restrict_to_partition(t.string, layout), t.tree};
            merged[std::move(key)] += lambda * t.string.phase();
        }
    }

    FactoredObservable out{layout, v.factor_count(), {}};
    out.terms.reserve(merged.size());
    for (auto& [key, base] : merged) {
        if (std::abs(base) < options.drop_tolerance) {
            continue;
        }
        FactoredTerm term;
        term.coeff = key.tree;
        term.coeff.set_base(base);
        term.factors = key.factors;
        out.terms.push_back(std::move(term));
    }
    return out;
}

}  // namespace qpart
