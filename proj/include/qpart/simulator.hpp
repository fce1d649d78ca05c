#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qpart/pauli.hpp"

namespace qpart {

/// Hard cap on subsystem size unless a caller overrides it; all shipped
/// experiments need at most 8 qubits per subsystem.
inline constexpr std::size_t kDefaultMaxSubsystemQubits = 14;

/// Dense statevector of one subsystem.  Amplitude ordering: qubit q is bit
/// q of the basis index, so qubit 0 is the least significant bit.
struct StateVector {
    std::size_t n_qubits = 0;
    std::vector<std::complex<double>> amplitudes;

    static StateVector zero_state(std::size_t n_qubits);
    double norm() const;
};

enum class AngleSource : std::uint8_t { Param, Data, Fixed };

struct Gate {
    enum class Kind : std::uint8_t { Ry, Cnot };
    Kind kind = Kind::Ry;
    std::uint32_t target = 0;
    std::uint32_t control = 0;           // CNOT only
    AngleSource source = AngleSource::Fixed;  // RY only
    std::uint32_t slot = 0;              // param/data slot (RY only)
    double angle = 0.0;                  // fixed angle (RY only)
};

/// Ordered gate list for one subsystem: RY rotations whose angles come from
/// a trainable parameter slot, a data slot (re-uploading), or a fixed
/// constant, plus CNOTs.  Each trainable slot may drive only one gate so
/// that the parameter-shift rule applies directly; data slots may be reused
/// freely.
class SubsystemCircuit {
  public:
    explicit SubsystemCircuit(std::size_t n_qubits);

    SubsystemCircuit& ry_param(std::size_t target, std::size_t slot);
    SubsystemCircuit& ry_data(std::size_t target, std::size_t slot);
    SubsystemCircuit& ry(std::size_t target, double angle);
    SubsystemCircuit& cnot(std::size_t control, std::size_t target);

    std::size_t n_qubits() const { return n_qubits_; }
    std::size_t param_count() const { return param_count_; }
    std::size_t data_count() const { return data_count_; }
    const std::vector<Gate>& gates() const { return gates_; }

  private:
    void check_target(std::size_t target) const;

    std::size_t n_qubits_;
    std::size_t param_count_ = 0;
    std::size_t data_count_ = 0;
    std::vector<Gate> gates_;
};

/// Applies the circuit to |0...0>.
StateVector run(const SubsystemCircuit& circuit,
                std::span<const double> params,
                std::span<const double> data = {},
                std::size_t max_qubits = kDefaultMaxSubsystemQubits);

/// <state|w|state> for a hermitian string (phase +1 or -1; +-i rejected).
/// The result is real within 1e-10 by construction; the residue is checked
/// and discarded.
double expectation(const StateVector& state, const PauliString& w);

/// Exact derivative of expectation(run(circuit, params, data), w) with
/// respect to params[slot] via the parameter-shift rule for RY-generated
/// gates: (E(theta + pi/2) - E(theta - pi/2)) / 2.
double param_shift_grad(const SubsystemCircuit& circuit,
                        std::span<const double> params,
                        std::span<const double> data, const PauliString& w,
                        std::size_t slot,
                        std::size_t max_qubits = kDefaultMaxSubsystemQubits);

/// Hardware-efficient block: per round, an RY rotation on every qubit
/// followed by a CNOT ladder 0->1, 1->2, ..., (n-2)->(n-1).  Uses
/// rounds * n_qubits parameter slots and no data slots.
SubsystemCircuit hardware_efficient_ansatz(std::size_t n_qubits,
                                           std::size_t rounds = 2);

}  // namespace qpart
