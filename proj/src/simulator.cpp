#include "qpart/simulator.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qpart {

StateVector StateVector::zero_state(std::size_t n_qubits) {
    if (n_qubits == 0) {
        throw std::invalid_argument("state needs at least one qubit");
    }
    StateVector s;
    s.n_qubits = n_qubits;
    s.amplitudes.assign(std::size_t{1} << n_qubits, {0.0, 0.0});
    s.amplitudes[0] = {1.0, 0.0};
    return s;
}

double StateVector::norm() const {
    double sum = 0.0;
    for (const auto& a : amplitudes) {
        sum += std::norm(a);
    }
    return std::sqrt(sum);
}

SubsystemCircuit::SubsystemCircuit(std::size_t n_qubits)
    : n_qubits_(n_qubits) {
    if (n_qubits == 0) {
        throw std::invalid_argument("circuit needs at least one qubit");
    }
}

void SubsystemCircuit::check_target(std::size_t target) const {
    if (target >= n_qubits_) {
        throw std::invalid_argument("gate target " + std::to_string(target) +
                                    " out of range for " +
                                    std::to_string(n_qubits_) + " qubits");
    }
}

SubsystemCircuit& SubsystemCircuit::ry_param(std::size_t target,
                                             std::size_t slot) {
    check_target(target);
    for (const Gate& g : gates_) {
        if (g.kind == Gate::Kind::Ry && g.source == AngleSource::Param &&
            g.slot == slot) {
            throw std::invalid_argument(
                "parameter slot " + std::to_string(slot) +
                " already drives a gate; shift-rule slots must be unique");
        }
    }
    gates_.push_back({Gate::Kind::Ry, static_cast<std::uint32_t>(target), 0,
                      AngleSource::Param, static_cast<std::uint32_t>(slot),
                      0.0});
    param_count_ = std::max(param_count_, slot + 1);
    return *this;
}

SubsystemCircuit& SubsystemCircuit::ry_data(std::size_t target,
                                            std::size_t slot) {
    check_target(target);
    gates_.push_back({Gate::Kind::Ry, static_cast<std::uint32_t>(target), 0,
                      AngleSource::Data, static_cast<std::uint32_t>(slot),
                      0.0});
    data_count_ = std::max(data_count_, slot + 1);
    return *this;
}

SubsystemCircuit& SubsystemCircuit::ry(std::size_t target, double angle) {
    check_target(target);
    gates_.push_back({Gate::Kind::Ry, static_cast<std::uint32_t>(target), 0,
                      AngleSource::Fixed, 0, angle});
    return *this;
}

SubsystemCircuit& SubsystemCircuit::cnot(std::size_t control,
                                         std::size_t target) {
    check_target(control);
    check_target(target);
    if (control == target) {
        throw std::invalid_argument("CNOT control equals target");
    }
    Gate g;
    g.kind = Gate::Kind::Cnot;
    g.control = static_cast<std::uint32_t>(control);
    g.target = static_cast<std::uint32_t>(target);
    gates_.push_back(g);
    return *this;
}

namespace {

void apply_ry(StateVector& state, std::size_t target, double angle) {
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    const std::size_t bit = std::size_t{1} << target;
    const std::size_t dim = state.amplitudes.size();
    auto* amps = state.amplitudes.data();
    for (std::size_t block = 0; block < dim; block += 2 * bit) {
        for (std::size_t i = block; i < block + bit; ++i) {
            const auto a0 = amps[i];
            const auto a1 = amps[i | bit];
            amps[i] = c * a0 - s * a1;
            amps[i | bit] = s * a0 + c * a1;
        }
    }
}

void apply_cnot(StateVector& state, std::size_t control, std::size_t target) {
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    const std::size_t dim = state.amplitudes.size();
    auto* amps = state.amplitudes.data();
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cbit) != 0 && (i & tbit) == 0) {
            std::swap(amps[i], amps[i | tbit]);
        }
    }
}

}  // namespace

StateVector run(const SubsystemCircuit& circuit,
                std::span<const double> params, std::span<const double> data,
                std::size_t max_qubits) {
    if (circuit.n_qubits() > max_qubits) {
        throw std::invalid_argument(
            "circuit has " + std::to_string(circuit.n_qubits()) +
            " qubits, above the cap of " + std::to_string(max_qubits));
    }
    if (params.size() != circuit.param_count()) {
        throw std::invalid_argument(
            "expected " + std::to_string(circuit.param_count()) +
            " parameters, got " + std::to_string(params.size()));
    }
    if (data.size() != circuit.data_count()) {
        throw std::invalid_argument(
            "expected " + std::to_string(circuit.data_count()) +
            " data values, got " + std::to_string(data.size()));
    }

    StateVector state = StateVector::zero_state(circuit.n_qubits());
    for (const Gate& g : circuit.gates()) {
        if (g.kind == Gate::Kind::Cnot) {
            apply_cnot(state, g.control, g.target);
            continue;
        }
        double angle = g.angle;
        if (g.source == AngleSource::Param) {
            angle = params[g.slot];
        } else if (g.source == AngleSource::Data) {
            angle = data[g.slot];
        }
        apply_ry(state, g.target, angle);
    }
    assert(std::abs(state.norm() - 1.0) < 1e-10);
    return state;
}

double expectation(const StateVector& state, const PauliString& w) {
    if (w.n_qubits() != state.n_qubits) {
        throw std::invalid_argument("operator and state qubit counts differ");
    }
    if (w.phase_exponent() % 2 != 0) {
        throw std::invalid_argument(
            "expectation of a non-hermitian string (phase +-i): " + w.str());
    }
    // n_qubits <= 14 here, so the bit masks fit one word.
    const std::uint64_t x = w.x_words()[0];
    const std::uint64_t z = w.z_words()[0];
    // W|b> = i^(k) * (-1)^popcount(b&z) |b^x> with a b-independent exponent
    // k = phase + (number of Y sites); for hermitian strings the total
    // prefactor of the quadratic form below is +-1 or +-i and the sum is
    // real either way.
    const int k =
        (w.phase_exponent() + std::popcount(x & z)) % 4;
    static const std::complex<double> i_pow[4] = {
        {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    const std::complex<double> prefactor = i_pow[k];

    const auto* amps = state.amplitudes.data();
    const std::size_t dim = state.amplitudes.size();
    std::complex<double> acc{0.0, 0.0};
    if (x == 0) {
        double diag = 0.0;
        for (std::size_t b = 0; b < dim; ++b) {
            const double sign =
                (std::popcount(b & z) & 1) != 0 ? -1.0 : 1.0;
            diag += sign * std::norm(amps[b]);
        }
        acc = diag;
    } else {
        for (std::size_t b = 0; b < dim; ++b) {
            const double sign =
                (std::popcount(b & z) & 1) != 0 ? -1.0 : 1.0;
            acc += std::conj(amps[b ^ x]) * (sign * amps[b]);
        }
    }
    const std::complex<double> value = prefactor * acc;
    if (std::abs(value.imag()) > 1e-10) {
        throw std::runtime_error("expectation has imaginary residue " +
                                 std::to_string(value.imag()));
    }
    return value.real();
}

double param_shift_grad(const SubsystemCircuit& circuit,
                        std::span<const double> params,
                        std::span<const double> data, const PauliString& w,
                        std::size_t slot, std::size_t max_qubits) {
    if (slot >= circuit.param_count()) {
        throw std::invalid_argument(
            "shift slot " + std::to_string(slot) +
            " is not a trainable parameter of this circuit");
    }
    std::vector<double> shifted(params.begin(), params.end());
    constexpr double half_pi = std::numbers::pi / 2.0;
    shifted[slot] = params[slot] + half_pi;
    const double plus = expectation(run(circuit, shifted, data, max_qubits), w);
    shifted[slot] = params[slot] - half_pi;
    const double minus =
        expectation(run(circuit, shifted, data, max_qubits), w);
    return 0.5 * (plus - minus);
}

SubsystemCircuit hardware_efficient_ansatz(std::size_t n_qubits,
                                           std::size_t rounds) {
    SubsystemCircuit c(n_qubits);
    for (std::size_t r = 0; r < rounds; ++r) {
        for (std::size_t q = 0; q < n_qubits; ++q) {
            c.ry_param(q, r * n_qubits + q);
        }
        for (std::size_t q = 0; q + 1 < n_qubits; ++q) {
            c.cnot(q, q + 1);
        }
    }
    return c;
}

}  // namespace qpart
