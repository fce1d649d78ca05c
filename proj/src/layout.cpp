#include "qpart/layout.hpp"

#include <stdexcept>
#include <string>

namespace qpart {

PartitionLayout PartitionLayout::contiguous(
    const std::vector<std::size_t>& sizes) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> mapping;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        for (std::size_t q = 0; q < sizes[s]; ++q) {
            mapping.emplace_back(static_cast<std::uint32_t>(s),
                                 static_cast<std::uint32_t>(q));
        }
    }
    return PartitionLayout(std::move(mapping));
}

PartitionLayout PartitionLayout::uniform(std::size_t subsystems,
                                         std::size_t qubits_each) {
    return contiguous(std::vector<std::size_t>(subsystems, qubits_each));
}

PartitionLayout::PartitionLayout(
    std::vector<std::pair<std::uint32_t, std::uint32_t>> mapping)
    : mapping_(std::move(mapping)) {
    if (mapping_.empty()) {
        throw std::invalid_argument("partition layout covers no qubits");
    }
    std::size_t subsystems = 0;
    for (const auto& [s, local] : mapping_) {
        subsystems = std::max<std::size_t>(subsystems, s + 1);
    }
    sizes_.assign(subsystems, 0);
    for (const auto& [s, local] : mapping_) {
        sizes_[s] = std::max<std::size_t>(sizes_[s], local + 1);
    }
    global_of_.resize(subsystems);
    for (std::size_t s = 0; s < subsystems; ++s) {
        if (sizes_[s] == 0) {
            throw std::invalid_argument("subsystem " + std::to_string(s) +
                                        " is empty");
        }
        global_of_[s].assign(sizes_[s], UINT32_MAX);
    }
    for (std::size_t g = 0; g < mapping_.size(); ++g) {
        const auto& [s, local] = mapping_[g];
        if (global_of_[s][local] != UINT32_MAX) {
            throw std::invalid_argument("layout maps two qubits to the same "
                                        "(subsystem, local) slot");
        }
        global_of_[s][local] = static_cast<std::uint32_t>(g);
    }
    std::size_t total = 0;
    for (const auto& slots : global_of_) {
        for (const auto g : slots) {
            if (g == UINT32_MAX) {
                throw std::invalid_argument("layout has an unmapped local "
                                            "slot; mapping is not a bijection");
            }
            ++total;
        }
    }
    if (total != mapping_.size()) {
        throw std::invalid_argument("layout is not a bijection");
    }
}

std::pair<std::size_t, std::size_t> PartitionLayout::locate(
    std::size_t global) const {
    const auto& [s, local] = mapping_.at(global);
    return {s, local};
}

std::size_t PartitionLayout::global_index(std::size_t subsystem,
                                          std::size_t local) const {
    return global_of_.at(subsystem).at(local);
}

std::vector<PauliString> restrict_to_partition(const PauliString& p,
                                               const PartitionLayout& layout) {
    if (p.n_qubits() != layout.n_qubits()) {
        throw std::invalid_argument("string and layout qubit counts differ");
    }
    std::vector<PauliString> factors;
    factors.reserve(layout.subsystem_count());
    for (std::size_t s = 0; s < layout.subsystem_count(); ++s) {
        factors.emplace_back(layout.subsystem_size(s));
    }
    for (std::size_t g = 0; g < p.n_qubits(); ++g) {
        const Pauli op = p.op(g);
        if (op == Pauli::I) {
            continue;
        }
        const auto [s, local] = layout.locate(g);
        factors[s].set_op(local, op);
    }
    return factors;
}

PauliString join_partition(std::span<const PauliString> factors,
                           const PartitionLayout& layout) {
    if (factors.size() != layout.subsystem_count()) {
        throw std::invalid_argument("factor count does not match layout");
    }
    PauliString out(layout.n_qubits());
    int phase = 0;
    for (std::size_t s = 0; s < factors.size(); ++s) {
        if (factors[s].n_qubits() != layout.subsystem_size(s)) {
            throw std::invalid_argument("factor " + std::to_string(s) +
                                        " has the wrong qubit count");
        }
        phase += factors[s].phase_exponent();
        for (std::size_t local = 0; local < factors[s].n_qubits(); ++local) {
            const Pauli op = factors[s].op(local);
            if (op != Pauli::I) {
                out.set_op(layout.global_index(s, local), op);
            }
        }
    }
    out.set_phase_exponent(phase);
    return out;
}

}  // namespace qpart
