#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qpart/pauli.hpp"

namespace qpart {

/// Disjoint partition of n qubits into S subsystems, with a bijective map
/// from global qubit indices to (subsystem, local qubit) pairs.
class PartitionLayout {
  public:
    /// Blocks of the given sizes in global order: subsystem 0 owns qubits
    /// [0, sizes[0]), subsystem 1 the next sizes[1] qubits, and so on.
    static PartitionLayout contiguous(const std::vector<std::size_t>& sizes);

    /// S equal blocks of qubits_each qubits.
    static PartitionLayout uniform(std::size_t subsystems,
                                   std::size_t qubits_each);

    /// General bijection: mapping[g] = (subsystem, local index) for global
    /// qubit g.  Validates that the map is a bijection onto contiguous
    /// local ranges.
    explicit PartitionLayout(
        std::vector<std::pair<std::uint32_t, std::uint32_t>> mapping);

    std::size_t n_qubits() const { return mapping_.size(); }
    std::size_t subsystem_count() const { return sizes_.size(); }
    std::size_t subsystem_size(std::size_t s) const { return sizes_[s]; }
    const std::vector<std::size_t>& sizes() const { return sizes_; }

    std::pair<std::size_t, std::size_t> locate(std::size_t global) const;
    std::size_t global_index(std::size_t subsystem, std::size_t local) const;

    bool operator==(const PartitionLayout& other) const {
        return mapping_ == other.mapping_;
    }

  private:
    std::vector<std::pair<std::uint32_t, std::uint32_t>> mapping_;
    std::vector<std::size_t> sizes_;
    std::vector<std::vector<std::uint32_t>> global_of_;
};

/// Splits p into one factor per subsystem such that the tensor product of
/// the factors (in layout order) reproduces p's operator content.  The
/// factors carry phase +1; p's own phase is not included and must be
/// handled by the caller.
std::vector<PauliString> restrict_to_partition(const PauliString& p,
                                               const PartitionLayout& layout);

/// Inverse of restrict_to_partition: re-tensors per-subsystem factors into
/// a global string (phase exponents of the factors are summed).
PauliString join_partition(std::span<const PauliString> factors,
                           const PartitionLayout& layout);

}  // namespace qpart
