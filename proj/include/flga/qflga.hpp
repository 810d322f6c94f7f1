#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "flga/field.hpp"

namespace flga {

/**
 * @brief Qubit layout of the one-step chain emulator.
 *
 * Registers, least significant bit first: ancilla a (1 qubit), channel copy
 * c3 (2), collision partner c2 (2), primary channel c1 (2), lattice position
 * (log2 L qubits). Channel codes are high-bit-first: 00 rest, 01 right,
 * 10 left; 11 is unused and never populated by the encoder.
 */
struct RegisterLayout {
  int lattice_qubits = 0;

  static constexpr int ancilla = 0;
  static constexpr int c3 = 1;
  static constexpr int c2 = 3;
  static constexpr int c1 = 5;
  static constexpr int lattice = 7;

  int total_qubits() const { return lattice_qubits + lattice; }
  std::size_t dimension() const { return std::size_t{1} << total_qubits(); }
  int length() const { return 1 << lattice_qubits; }
};

// Layout for a chain of the given length; L must be a power of two.
RegisterLayout make_layout(int length);

struct QuantumState {
  RegisterLayout layout;
  std::vector<std::complex<double>> amp;
  // Global mass of the encoded field, divided out by encode and restored by
  // measure_step.
  double mass = 1.0;
};

double state_norm(const QuantumState& state);

// One single-target gate with any number of (anti-)controls. value = true is
// a regular control, false fires on |0>.
struct Control {
  int qubit = 0;
  bool value = true;
};

struct Gate {
  std::string name;  // "x", "h" or "ry"
  int target = 0;
  double angle = 0.0;  // ry only
  std::vector<Control> controls;
};

void apply_gate(QuantumState& state, const Gate& gate);

// Applies the gates in order, verifying unit norm after each one.
void apply_circuit(QuantumState& state, std::span<const Gate> gates);

// One line per gate: name, target, angle, then control qubits ("!q" fires
// on zero), for auditing assembled circuits.
void write_gates(std::ostream& os, std::span<const Gate> gates);

// Rotation angle whose rotated branch carries probability p.
double angle_from_probability(double p);

/**
 * @brief Amplitude-encode a chain field into the two-copy product state.
 *
 * The amplitude of |l, c1, c2, c3=00, a=0> is sqrt(f_c1(l) f_c2(l) / rho_l)
 * scaled by the global mass, which makes the state exactly unit norm. The
 * collision circuit's first box copies c1 into c3. Errors: a length that is
 * not a power of two, a negative entry, solid cells, or zero total mass.
 */
QuantumState encode(const FieldState& field);

/**
 * @brief The one-step collision circuit.
 *
 * Box A copies c1 to c3; box B splits the rest-rest configuration into right
 * and left on c3 with branch probability s = C*lambda/8 per side pair; boxes
 * C1/C2 rotate the copied channel of the two right-left configurations into
 * rest with probability q = C*lambda. Each configuration couples to one side
 * of the pair only, so the per-ordering split probability p = C*lambda/2 is
 * capped at one half; beyond that the rotation cannot represent the rate and
 * the call throws.
 */
std::vector<Gate> collision_circuit(double lambda, double c);

// Cyclic shift of the lattice register conditioned on c3: right moves l to
// l+1, left to l-1, rest stays. Exact permutation of the amplitudes.
void propagate(QuantumState& state);

/**
 * @brief Read the (l, c3) marginal back into a chain field.
 *
 * Exact marginal probabilities by default (no sampling noise), rescaled by
 * the encoded global mass. Throws when the total marginal is zero or when
 * weight has leaked into the unused channel code.
 */
FieldState measure_step(const QuantumState& state);

// Shot-sampling variant: multinomial draws over the same marginal.
FieldState measure_step_shots(const QuantumState& state, long long shots,
                              std::uint64_t seed);

// encode -> collision circuit -> propagate -> measure, one full update.
FieldState qflga_step(const FieldState& field, double lambda, double c);

}  // namespace flga
