#include "qpart/partition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qpart {

namespace {

constexpr double kImaginaryResidueLimit = 1e-8;

std::vector<std::pair<std::size_t, PauliString>> build_pool(
    const std::vector<std::vector<PauliString>>& term_factors) {
    std::vector<std::pair<std::size_t, PauliString>> pool;
    for (const auto& factors : term_factors) {
        for (std::size_t s = 0; s < factors.size(); ++s) {
            if (!factors[s].is_identity_ops()) {
                pool.emplace_back(s, factors[s]);
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

}  // namespace

std::vector<std::pair<std::size_t, PauliString>>
NumericFactoredObservable::operator_pool() const {
    std::vector<std::vector<PauliString>> factor_lists;
    factor_lists.reserve(terms.size());
    for (const NumericTerm& t : terms) {
        factor_lists.push_back(t.factors);
    }
    return build_pool(factor_lists);
}

std::vector<double> ModelParams::flattened() const {
    std::vector<double> out;
    out.reserve(theta.size() + coeffs.size());
    out.insert(out.end(), theta.begin(), theta.end());
    out.insert(out.end(), coeffs.begin(), coeffs.end());
    return out;
}

std::size_t EvaluationCache::KeyHash::operator()(const Key& k) const {
    std::size_t seed = k.op.hash() ^ (k.subsystem * 0x9e3779b97f4a7c15ull);
    for (const double v : k.inputs) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        seed ^= bits + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
    }
    return seed;
}

bool EvaluationCache::lookup(const Key& key, double& out) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        ++misses_;
        return false;
    }
    ++hits_;
    out = it->second;
    return true;
}

void EvaluationCache::store(Key key, double value) {
    values_.emplace(std::move(key), value);
}

void EvaluationCache::clear() {
    values_.clear();
    hits_ = 0;
    misses_ = 0;
}

PartitionedModel::PartitionedModel(std::vector<SubsystemCircuit> circuits,
                                   FactoredObservable observable)
    : layout_(observable.layout), circuits_(std::move(circuits)) {
    is_tree_ = true;
    coefficient_count_ = observable.angle_count;
    validate_circuits();

    std::vector<std::vector<PauliString>> factor_lists;
    factor_lists.reserve(observable.terms.size());
    terms_.reserve(observable.terms.size());
    for (FactoredTerm& t : observable.terms) {
        CompiledTerm ct;
        ct.tree = std::move(t.coeff);
        factor_lists.push_back(std::move(t.factors));
        terms_.push_back(std::move(ct));
    }
    compile(factor_lists);

    terms_by_angle_.assign(coefficient_count_, {});
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        for (const auto& [index, kind] : terms_[t].tree.factors()) {
            terms_by_angle_[index].push_back(t);
        }
    }
}

PartitionedModel::PartitionedModel(std::vector<SubsystemCircuit> circuits,
                                   NumericFactoredObservable observable)
    : layout_(observable.layout), circuits_(std::move(circuits)) {
    is_tree_ = false;
    coefficient_count_ = observable.coefficient_count;
    reported_expectations_ = observable.reported_expectations;
    validate_circuits();

    std::vector<std::vector<PauliString>> factor_lists;
    factor_lists.reserve(observable.terms.size());
    terms_.reserve(observable.terms.size());
    for (NumericTerm& t : observable.terms) {
        if (t.coefficient_slot >= coefficient_count_) {
            throw std::invalid_argument("term coefficient slot out of range");
        }
        CompiledTerm ct;
        ct.coefficient_slot = t.coefficient_slot;
        factor_lists.push_back(std::move(t.factors));
        terms_.push_back(std::move(ct));
    }
    compile(factor_lists);
}

void PartitionedModel::validate_circuits() const {
    if (circuits_.size() != layout_.subsystem_count()) {
        throw std::invalid_argument(
            "need one circuit per subsystem: " +
            std::to_string(layout_.subsystem_count()) + " subsystems, " +
            std::to_string(circuits_.size()) + " circuits");
    }
    for (std::size_t s = 0; s < circuits_.size(); ++s) {
        if (circuits_[s].n_qubits() != layout_.subsystem_size(s)) {
            throw std::invalid_argument("circuit " + std::to_string(s) +
                                        " does not match subsystem size");
        }
    }
}

void PartitionedModel::compile(
    const std::vector<std::vector<PauliString>>& term_factors) {
    theta_offsets_.resize(circuits_.size());
    for (std::size_t s = 0; s < circuits_.size(); ++s) {
        theta_offsets_[s] = theta_count_;
        theta_count_ += circuits_[s].param_count();
        if (circuits_[s].data_count() > 0) {
            has_data_ = true;
        }
    }

    for (const auto& factors : term_factors) {
        if (factors.size() != layout_.subsystem_count()) {
            throw std::invalid_argument(
                "term factor count does not match subsystem count");
        }
        for (std::size_t s = 0; s < factors.size(); ++s) {
            if (factors[s].n_qubits() != layout_.subsystem_size(s)) {
                throw std::invalid_argument(
                    "term factor acts on the wrong number of qubits");
            }
            if (factors[s].phase_exponent() != 0) {
                throw std::invalid_argument(
                    "term factors must be phase-free");
            }
        }
    }

    pool_ = build_pool(term_factors);
    pool_offsets_.assign(circuits_.size() + 1, 0);
    for (std::size_t k = 0; k < pool_.size(); ++k) {
        pool_offsets_[pool_[k].first + 1] = k + 1;
    }
    for (std::size_t s = 1; s <= circuits_.size(); ++s) {
        pool_offsets_[s] = std::max(pool_offsets_[s], pool_offsets_[s - 1]);
    }

    auto pool_index = [&](std::size_t s, const PauliString& op) {
        const auto begin = pool_.begin() + pool_offsets_[s];
        const auto end = pool_.begin() + pool_offsets_[s + 1];
        const auto it = std::lower_bound(
            begin, end, op, [](const auto& entry, const PauliString& value) {
                return PauliString::less(entry.second, value);
            });
        return static_cast<std::int32_t>(it - pool_.begin());
    };

    terms_by_subsystem_.assign(circuits_.size(), {});
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        auto& ct = terms_[t];
        ct.pool_ref.assign(layout_.subsystem_count(), -1);
        for (std::size_t s = 0; s < term_factors[t].size(); ++s) {
            if (term_factors[t][s].is_identity_ops()) {
                continue;
            }
            ct.pool_ref[s] = pool_index(s, term_factors[t][s]);
            ct.active.push_back(static_cast<std::uint32_t>(s));
            terms_by_subsystem_[s].push_back(t);
        }
    }
}

namespace {

struct BaseEvaluation {
    std::vector<StateVector> states;
    std::vector<double> pool_values;
};

std::span<const double> theta_slice(const PartitionedModel& model,
                                    const ModelParams& params,
                                    std::size_t s) {
    return {params.theta.data() + model.theta_offset(s),
            model.circuit(s).param_count()};
}

std::span<const double> data_slice(const Sample* data, std::size_t s) {
    if (data == nullptr) {
        return {};
    }
    return {(*data)[s].data(), (*data)[s].size()};
}

void validate_inputs(const PartitionedModel& model, const ModelParams& params,
                     const Sample* data) {
    if (params.theta.size() != model.theta_count()) {
        throw std::invalid_argument(
            "theta has " + std::to_string(params.theta.size()) +
            " entries, model needs " + std::to_string(model.theta_count()));
    }
    if (params.coeffs.size() != model.coefficient_count()) {
        throw std::invalid_argument(
            "coefficient vector has " + std::to_string(params.coeffs.size()) +
            " entries, model needs " +
            std::to_string(model.coefficient_count()));
    }
    if (model.has_data_slots()) {
        if (data == nullptr) {
            throw std::invalid_argument(
                "model circuits have data slots but no sample was given");
        }
        if (data->size() != model.subsystem_count()) {
            throw std::invalid_argument(
                "sample must provide one feature vector per subsystem");
        }
    } else if (data != nullptr) {
        bool any = false;
        for (const auto& features : *data) {
            any = any || !features.empty();
        }
        if (any) {
            throw std::invalid_argument(
                "sample data given but model circuits have no data slots");
        }
    }
}

EvaluationCache::Key make_key(const PartitionedModel& model,
                              const ModelParams& params, const Sample* data,
                              std::size_t s, const PauliString& op) {
    EvaluationCache::Key key;
    key.subsystem = s;
    key.op = op;
    const auto theta = theta_slice(model, params, s);
    const auto features = data_slice(data, s);
    key.inputs.reserve(theta.size() + features.size());
    key.inputs.insert(key.inputs.end(), theta.begin(), theta.end());
    key.inputs.insert(key.inputs.end(), features.begin(), features.end());
    return key;
}

/// Expectations of every pool operator of one subsystem from a freshly run
/// state (one circuit execution, many measurements).
void fill_subsystem_values(const PartitionedModel& model,
                           std::span<const double> theta,
                           std::span<const double> features, std::size_t s,
                           PartitionedModel::PoolRange range,
                           std::span<double> out, const EvalOptions& opts,
                           StateVector* state_out = nullptr) {
    StateVector state = run(model.circuit(s), theta, features);
    if (opts.counters != nullptr) {
        ++opts.counters->circuit_runs;
    }
    for (std::size_t k = range.begin; k < range.end; ++k) {
        out[k - range.begin] = expectation(state, model.pool()[k].second);
        if (opts.counters != nullptr) {
            ++opts.counters->expectations;
        }
    }
    if (state_out != nullptr) {
        *state_out = std::move(state);
    }
}

BaseEvaluation evaluate_base(const PartitionedModel& model,
                             const ModelParams& params, const Sample* data,
                             const EvalOptions& opts) {
    validate_inputs(model, params, data);
    BaseEvaluation base;
    base.pool_values.assign(model.pool().size(), 0.0);
    base.states.resize(model.subsystem_count());

    for (std::size_t s = 0; s < model.subsystem_count(); ++s) {
        const auto range = model.pool_range(s);
        const auto theta = theta_slice(model, params, s);
        const auto features = data_slice(data, s);

        if (opts.cache != nullptr) {
            bool all_hit = range.size() > 0;
            for (std::size_t k = range.begin; k < range.end; ++k) {
                double value = 0.0;
                if (opts.cache->lookup(
                        make_key(model, params, data, s,
                                 model.pool()[k].second),
                        value)) {
                    base.pool_values[k] = value;
                } else {
                    all_hit = false;
                }
            }
            if (all_hit) {
                continue;
            }
        }

        std::vector<double> values(range.size(), 0.0);
        fill_subsystem_values(model, theta, features, s, range, values, opts,
                              &base.states[s]);
        for (std::size_t k = range.begin; k < range.end; ++k) {
            base.pool_values[k] = values[k - range.begin];
            if (opts.cache != nullptr) {
                opts.cache->store(make_key(model, params, data, s,
                                           model.pool()[k].second),
                                  values[k - range.begin]);
            }
        }
    }
    return base;
}

double term_product(const PartitionedModel::CompiledTerm& term,
                    std::span<const double> pool_values) {
    double product = 1.0;
    for (const std::uint32_t s : term.active) {
        product *= pool_values[static_cast<std::size_t>(term.pool_ref[s])];
    }
    return product;
}

double term_product_excluding(const PartitionedModel::CompiledTerm& term,
                              std::span<const double> pool_values,
                              std::size_t excluded_subsystem) {
    double product = 1.0;
    for (const std::uint32_t s : term.active) {
        if (s != excluded_subsystem) {
            product *=
                pool_values[static_cast<std::size_t>(term.pool_ref[s])];
        }
    }
    return product;
}

std::vector<std::complex<double>> term_coefficients(
    const PartitionedModel& model, const ModelParams& params) {
    std::vector<std::complex<double>> coeffs(model.terms().size());
    for (std::size_t t = 0; t < model.terms().size(); ++t) {
        coeffs[t] = model.uses_coefficient_trees()
                        ? model.terms()[t].tree.eval(params.coeffs)
                        : std::complex<double>(
                              params.coeffs[model.terms()[t]
                                                .coefficient_slot]);
    }
    return coeffs;
}

double real_or_throw(std::complex<double> value, const char* what) {
    if (std::abs(value.imag()) > kImaginaryResidueLimit) {
        throw std::runtime_error(
            std::string(what) + " has imaginary residue " +
            std::to_string(value.imag()) +
            "; the observable is not hermitian");
    }
    return value.real();
}

double contract_forward(const PartitionedModel& model,
                        std::span<const std::complex<double>> coeffs,
                        std::span<const double> pool_values) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t t = 0; t < model.terms().size(); ++t) {
        acc += coeffs[t] * term_product(model.terms()[t], pool_values);
    }
    return real_or_throw(acc, "model output");
}

/// Parameter-shift derivatives of every pool operator of subsystem q with
/// respect to one rotation slot: two shifted circuit runs, then all needed
/// expectations from each.
std::vector<double> shifted_r_values(const PartitionedModel& model,
                                     const ModelParams& params,
                                     const Sample* data, std::size_t q,
                                     std::size_t slot,
                                     const EvalOptions& opts) {
    const auto range = model.pool_range(q);
    const auto features = data_slice(data, q);
    std::vector<double> theta(theta_slice(model, params, q).begin(),
                              theta_slice(model, params, q).end());
    constexpr double half_pi = std::numbers::pi / 2.0;
    const double original = theta[slot];

    std::vector<double> plus(range.size(), 0.0);
    std::vector<double> minus(range.size(), 0.0);
    theta[slot] = original + half_pi;
    fill_subsystem_values(model, theta, features, q, range, plus, opts);
    theta[slot] = original - half_pi;
    fill_subsystem_values(model, theta, features, q, range, minus, opts);

    std::vector<double> r(range.size(), 0.0);
    for (std::size_t j = 0; j < range.size(); ++j) {
        r[j] = 0.5 * (plus[j] - minus[j]);
    }
    return r;
}

std::vector<double> grad_theta_impl(
    const PartitionedModel& model, const ModelParams& params,
    const Sample* data, std::span<const std::complex<double>> coeffs,
    std::span<const double> pool_values, const EvalOptions& opts) {
    std::vector<double> grad(model.theta_count(), 0.0);
    for (std::size_t q = 0; q < model.subsystem_count(); ++q) {
        if (model.terms_on_subsystem(q).empty()) {
            continue;  // observable never measures this subsystem
        }
        const auto range = model.pool_range(q);
        for (std::size_t slot = 0; slot < model.circuit(q).param_count();
             ++slot) {
            const auto r = shifted_r_values(model, params, data, q, slot,
                                            opts);
            std::complex<double> acc{0.0, 0.0};
            for (const std::size_t t : model.terms_on_subsystem(q)) {
                const auto& term = model.terms()[t];
                const std::size_t k =
                    static_cast<std::size_t>(term.pool_ref[q]);
                acc += coeffs[t] * r[k - range.begin] *
                       term_product_excluding(term, pool_values, q);
            }
            grad[model.theta_offset(q) + slot] =
                real_or_throw(acc, "theta gradient");
        }
    }
    return grad;
}

std::vector<double> grad_coeffs_impl(const PartitionedModel& model,
                                     const ModelParams& params,
                                     std::span<const double> pool_values) {
    std::vector<double> grad(model.coefficient_count(), 0.0);
    if (!model.uses_coefficient_trees()) {
        for (const auto& term : model.terms()) {
            grad[term.coefficient_slot] += term_product(term, pool_values);
        }
        return grad;
    }
    for (std::size_t i = 0; i < model.coefficient_count(); ++i) {
        std::complex<double> acc{0.0, 0.0};
        for (const std::size_t t : model.terms_on_angle(i)) {
            acc += model.terms()[t].tree.grad(params.coeffs, i) *
                   term_product(model.terms()[t], pool_values);
        }
        grad[i] = real_or_throw(acc, "coefficient gradient");
    }
    return grad;
}

}  // namespace

double forward(const PartitionedModel& model, const ModelParams& params,
               const Sample* data, const EvalOptions& opts) {
    const auto base = evaluate_base(model, params, data, opts);
    const auto coeffs = term_coefficients(model, params);
    return contract_forward(model, coeffs, base.pool_values);
}

std::vector<double> grad_theta(const PartitionedModel& model,
                               const ModelParams& params, const Sample* data,
                               const EvalOptions& opts) {
    const auto base = evaluate_base(model, params, data, opts);
    const auto coeffs = term_coefficients(model, params);
    return grad_theta_impl(model, params, data, coeffs, base.pool_values,
                           opts);
}

std::vector<double> grad_coeffs(const PartitionedModel& model,
                                const ModelParams& params, const Sample* data,
                                const EvalOptions& opts) {
    const auto base = evaluate_base(model, params, data, opts);
    return grad_coeffs_impl(model, params, base.pool_values);
}

double grad_theta_slot(const PartitionedModel& model,
                       const ModelParams& params, const Sample* data,
                       std::size_t subsystem, std::size_t slot,
                       const EvalOptions& opts) {
    if (subsystem >= model.subsystem_count() ||
        slot >= model.circuit(subsystem).param_count()) {
        throw std::invalid_argument("gradient slot out of range");
    }
    const auto base = evaluate_base(model, params, data, opts);
    const auto coeffs = term_coefficients(model, params);

    const auto range = model.pool_range(subsystem);
    const auto r =
        shifted_r_values(model, params, data, subsystem, slot, opts);
    std::complex<double> acc{0.0, 0.0};
    for (const std::size_t t : model.terms_on_subsystem(subsystem)) {
        const auto& term = model.terms()[t];
        const std::size_t k =
            static_cast<std::size_t>(term.pool_ref[subsystem]);
        acc += coeffs[t] * r[k - range.begin] *
               term_product_excluding(term, base.pool_values, subsystem);
    }
    return real_or_throw(acc, "theta gradient");
}

ValueAndGrads value_and_grads(const PartitionedModel& model,
                              const ModelParams& params, const Sample* data,
                              const EvalOptions& opts) {
    const auto base = evaluate_base(model, params, data, opts);
    const auto coeffs = term_coefficients(model, params);
    ValueAndGrads out;
    out.value = contract_forward(model, coeffs, base.pool_values);
    out.theta = grad_theta_impl(model, params, data, coeffs,
                                base.pool_values, opts);
    out.coeffs = grad_coeffs_impl(model, params, base.pool_values);
    return out;
}

MeasurementBudget measurement_budget(const PartitionedModel& model) {
    MeasurementBudget budget;
    budget.simulated_expectations = model.pool().size();
    budget.unique_expectations = model.reported_expectations() != 0
                                     ? model.reported_expectations()
                                     : model.pool().size();
    budget.term_count = model.terms().size();
    budget.coefficient_count = model.coefficient_count();
    return budget;
}

std::vector<std::pair<std::pair<std::size_t, PauliString>, double>>
ranked_expectations(const PartitionedModel& model, const ModelParams& params,
                    const Sample* data) {
    const auto base = evaluate_base(model, params, data, {});
    std::vector<std::pair<std::pair<std::size_t, PauliString>, double>> out;
    out.reserve(model.pool().size());
    for (std::size_t k = 0; k < model.pool().size(); ++k) {
        out.emplace_back(model.pool()[k], base.pool_values[k]);
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::abs(a.second) > std::abs(b.second);
    });
    return out;
}

}  // namespace qpart
