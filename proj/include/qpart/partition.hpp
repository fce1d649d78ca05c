#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "qpart/conjugate.hpp"
#include "qpart/layout.hpp"
#include "qpart/pauli.hpp"
#include "qpart/simulator.hpp"

namespace qpart {

/// Observable with plain trainable coefficients (the supervised path):
/// each term references one slot of the coefficient vector.
struct NumericTerm {
    std::size_t coefficient_slot = 0;
    std::vector<PauliString> factors;  // one phase-free string per subsystem
};

struct NumericFactoredObservable {
    PartitionLayout layout;
    std::size_t coefficient_count = 0;
    std::vector<NumericTerm> terms;

    /// Per-evaluation expectation count in the slot-wise accounting used by
    /// the reference results (identity measurements on designated qubits
    /// count as expectations there).  Builders that know their slot
    /// structure set this; 0 means "report the simulated pool size".
    std::size_t reported_expectations = 0;

    std::vector<std::pair<std::size_t, PauliString>> operator_pool() const;
};

/// Per-subsystem feature vectors for one data sample.
using Sample = std::vector<std::vector<double>>;

struct ModelParams {
    std::vector<double> theta;   // concatenated per-subsystem rotations
    std::vector<double> coeffs;  // angles c (tree path) or weights d

    std::vector<double> flattened() const;
};

/// Counts of simulator work actually performed (cache hits excluded).
struct EvalCounters {
    std::size_t circuit_runs = 0;
    std::size_t expectations = 0;
};

/// Cross-call memo of subsystem expectation values keyed by the exact
/// inputs that determine them: (subsystem, operator, rotation angles and
/// data fed to that subsystem).  Hits are bit-identical to recomputation
/// because the stored value is the recomputation's own output.
class EvaluationCache {
  public:
    struct Key {
        std::size_t subsystem = 0;
        PauliString op{1};
        std::vector<double> inputs;

        bool operator==(const Key& other) const {
            return subsystem == other.subsystem && op == other.op &&
                   inputs == other.inputs;
        }
    };

    bool lookup(const Key& key, double& out) const;
    void store(Key key, double value);
    void clear();

    std::size_t size() const { return values_.size(); }
    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }

  private:
    struct KeyHash {
        std::size_t operator()(const Key& k) const;
    };

    std::unordered_map<Key, double, KeyHash> values_;
    mutable std::size_t hits_ = 0;
    mutable std::size_t misses_ = 0;
};

struct EvalOptions {
    EvaluationCache* cache = nullptr;
    EvalCounters* counters = nullptr;
};

/// Partitioned quantum model: a partition layout, one parameterized circuit
/// per subsystem, and a factored observable whose coefficients are either
/// symbolic trees over angles (the conjugated-Hamiltonian path) or plain
/// trainable weights (the supervised path).
class PartitionedModel {
  public:
    PartitionedModel(std::vector<SubsystemCircuit> circuits,
                     FactoredObservable observable);
    PartitionedModel(std::vector<SubsystemCircuit> circuits,
                     NumericFactoredObservable observable);

    const PartitionLayout& layout() const { return layout_; }
    std::size_t subsystem_count() const { return circuits_.size(); }
    const SubsystemCircuit& circuit(std::size_t s) const {
        return circuits_[s];
    }

    std::size_t theta_count() const { return theta_count_; }
    std::size_t theta_offset(std::size_t s) const { return theta_offsets_[s]; }
    std::size_t coefficient_count() const { return coefficient_count_; }
    std::size_t parameter_count() const {
        return theta_count_ + coefficient_count_;
    }

    bool uses_coefficient_trees() const { return is_tree_; }
    bool has_data_slots() const { return has_data_; }

    /// Sorted unique non-identity (subsystem, operator) pairs.
    const std::vector<std::pair<std::size_t, PauliString>>& pool() const {
        return pool_;
    }

    struct CompiledTerm {
        CoefficientTree tree;              // tree path
        std::size_t coefficient_slot = 0;  // numeric path
        std::vector<std::int32_t> pool_ref;     // per subsystem, -1 = identity
        std::vector<std::uint32_t> active;      // subsystems with a factor
    };

    const std::vector<CompiledTerm>& terms() const { return terms_; }

    /// Contiguous pool slice owned by one subsystem (the pool is sorted by
    /// subsystem first).
    struct PoolRange {
        std::size_t begin = 0;
        std::size_t end = 0;
        std::size_t size() const { return end - begin; }
    };
    PoolRange pool_range(std::size_t subsystem) const {
        return {pool_offsets_[subsystem], pool_offsets_[subsystem + 1]};
    }

    const std::vector<std::size_t>& terms_on_subsystem(std::size_t s) const {
        return terms_by_subsystem_[s];
    }
    const std::vector<std::size_t>& terms_on_angle(std::size_t index) const {
        return terms_by_angle_[index];
    }
    std::size_t reported_expectations() const {
        return reported_expectations_;
    }

  private:
    void compile(
        const std::vector<std::vector<PauliString>>& term_factors);
    void validate_circuits() const;

    PartitionLayout layout_;
    std::vector<SubsystemCircuit> circuits_;
    bool is_tree_ = false;
    bool has_data_ = false;
    std::size_t theta_count_ = 0;
    std::size_t coefficient_count_ = 0;
    std::size_t reported_expectations_ = 0;
    std::vector<std::size_t> theta_offsets_;
    std::vector<std::pair<std::size_t, PauliString>> pool_;
    std::vector<std::size_t> pool_offsets_;  // per subsystem, into pool_
    std::vector<CompiledTerm> terms_;
    std::vector<std::vector<std::size_t>> terms_by_subsystem_;
    std::vector<std::vector<std::size_t>> terms_by_angle_;
};

/// Model output sum_p d_p prod_s B_s^p.  Each unique (subsystem, operator)
/// expectation is evaluated once; identity factors contribute exactly 1
/// without simulation; terms are summed in the model's fixed order.
double forward(const PartitionedModel& model, const ModelParams& params,
               const Sample* data = nullptr, const EvalOptions& opts = {});

/// Gradient over every rotation parameter via the parameter-shift rule,
/// reusing the unshifted expectations for the other subsystems' factors.
std::vector<double> grad_theta(const PartitionedModel& model,
                               const ModelParams& params,
                               const Sample* data = nullptr,
                               const EvalOptions& opts = {});

/// Gradient over the coefficient parameters: per-term products of cached
/// subsystem expectations (numeric path) or coefficient-tree derivatives
/// contracted with those products (tree path).
std::vector<double> grad_coeffs(const PartitionedModel& model,
                                const ModelParams& params,
                                const Sample* data = nullptr,
                                const EvalOptions& opts = {});

/// Single-slot variant of grad_theta (used by the variance scan, which
/// samples one designated parameter).
double grad_theta_slot(const PartitionedModel& model,
                       const ModelParams& params, const Sample* data,
                       std::size_t subsystem, std::size_t slot,
                       const EvalOptions& opts = {});

struct ValueAndGrads {
    double value = 0.0;
    std::vector<double> theta;
    std::vector<double> coeffs;
};

/// forward + grad_theta + grad_coeffs sharing one base evaluation.
ValueAndGrads value_and_grads(const PartitionedModel& model,
                              const ModelParams& params,
                              const Sample* data = nullptr,
                              const EvalOptions& opts = {});

struct MeasurementBudget {
    /// Expectations per model evaluation in the reporting convention of the
    /// observable builder (equals simulated_expectations unless the builder
    /// counts designated identity slots as well).
    std::size_t unique_expectations = 0;
    /// Distinct non-identity (subsystem, operator) pairs actually simulated.
    std::size_t simulated_expectations = 0;
    std::size_t term_count = 0;
    std::size_t coefficient_count = 0;
};

MeasurementBudget measurement_budget(const PartitionedModel& model);

/// Expectations ranked by |value| at the given parameters, largest first:
/// the raw material for hand-picking a reduced operator basis.
std::vector<std::pair<std::pair<std::size_t, PauliString>, double>>
ranked_expectations(const PartitionedModel& model, const ModelParams& params,
                    const Sample* data = nullptr);

}  // namespace qpart
