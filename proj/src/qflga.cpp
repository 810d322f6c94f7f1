#include "flga/qflga.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "flga/lattice.hpp"

namespace flga {

namespace {

constexpr int kRest = 0b00, kRight = 0b01, kLeft = 0b10, kUnused = 0b11;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int channel_code(int channel) {
  switch (channel) {
    case 0: return kRest;
    case 1: return kRight;
    case 2: return kLeft;
    default: throw std::logic_error("channel_code: not a chain channel");
  }
}

int code_channel(int code) {
  switch (code) {
    case kRest: return 0;
    case kRight: return 1;
    case kLeft: return 2;
    default: return -1;
  }
}

}  // namespace

RegisterLayout make_layout(int length) {
  if (!is_power_of_two(length)) {
    throw std::invalid_argument("make_layout: length must be a power of two");
  }
  RegisterLayout layout;
  layout.lattice_qubits = 0;
  while ((1 << layout.lattice_qubits) < length) ++layout.lattice_qubits;
  return layout;
}

double state_norm(const QuantumState& state) {
  double acc = 0.0;
  for (const auto& a : state.amp) acc += std::norm(a);
  return std::sqrt(acc);
}

void apply_gate(QuantumState& state, const Gate& gate) {
  double m00, m01, m10, m11;
  if (gate.name == "x") {
    m00 = 0.0; m01 = 1.0; m10 = 1.0; m11 = 0.0;
  } else if (gate.name == "h") {
    const double r = 1.0 / std::sqrt(2.0);
    m00 = r; m01 = r; m10 = r; m11 = -r;
  } else if (gate.name == "ry") {
    const double ch = std::cos(gate.angle / 2.0);
    const double sh = std::sin(gate.angle / 2.0);
    m00 = ch; m01 = -sh; m10 = sh; m11 = ch;
  } else {
    throw std::invalid_argument("apply_gate: unknown gate " + gate.name);
  }

  const std::size_t tbit = std::size_t{1} << gate.target;
  const std::size_t dim = state.amp.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & tbit) continue;  // visit each (0,1) pair once, from the 0 side
    bool active = true;
    for (const Control& c : gate.controls) {
      const bool set = (i >> c.qubit) & 1;
      if (set != c.value) {
        active = false;
        break;
      }
    }
    if (!active) continue;
    const std::size_t j = i | tbit;
    const auto a0 = state.amp[i], a1 = state.amp[j];
    state.amp[i] = m00 * a0 + m01 * a1;
    state.amp[j] = m10 * a0 + m11 * a1;
  }
}

void apply_circuit(QuantumState& state, std::span<const Gate> gates) {
  for (const Gate& g : gates) {
    apply_gate(state, g);
    const double n = state_norm(state);
    if (std::abs(n - 1.0) > 1e-12) {
      throw std::logic_error("apply_circuit: norm drifted to " +
                             std::to_string(n) + " after gate " + g.name);
    }
  }
}

void write_gates(std::ostream& os, std::span<const Gate> gates) {
  for (const Gate& g : gates) {
    os << g.name << " target=" << g.target;
    if (g.name == "ry") os << " angle=" << g.angle;
    if (!g.controls.empty()) {
      os << " controls=";
      for (std::size_t i = 0; i < g.controls.size(); ++i) {
        if (i) os << ',';
        if (!g.controls[i].value) os << '!';
        os << g.controls[i].qubit;
      }
    }
    os << '\n';
  }
}

double angle_from_probability(double p) {
  if (!(p >= 0.0) || p > 1.0) {
    throw std::invalid_argument(
        "angle_from_probability: p outside [0, 1]");
  }
  return 2.0 * std::asin(std::sqrt(p));
}

QuantumState encode(const FieldState& field) {
  if (field.model != Model::d1q3 || field.ly != 1) {
    throw std::invalid_argument("encode: expected a 1D chain field");
  }
  if (field.has_solid()) {
    throw std::invalid_argument(
        "encode: solid cells are handled classically outside the circuit");
  }

  QuantumState state;
  state.layout = make_layout(field.lx);
  state.amp.assign(state.layout.dimension(), {0.0, 0.0});

  double mass = 0.0;
  for (double v : field.f) {
    if (v < 0.0) {
      throw std::invalid_argument("encode: negative distribution value");
    }
    mass += v;
  }
  if (!(mass > 0.0)) {
    throw std::invalid_argument("encode: zero total mass");
  }
  state.mass = mass;

  for (int l = 0; l < field.lx; ++l) {
    double rho = 0.0;
    for (int ch = 0; ch < 3; ++ch) rho += field.at(ch, l);
    if (rho <= 0.0) continue;
    for (int ch1 = 0; ch1 < 3; ++ch1) {
      for (int ch2 = 0; ch2 < 3; ++ch2) {
        const double w = field.at(ch1, l) * field.at(ch2, l) / (rho * mass);
        if (w == 0.0) continue;
        const std::size_t idx =
            (static_cast<std::size_t>(l) << RegisterLayout::lattice) |
            (static_cast<std::size_t>(channel_code(ch1))
             << RegisterLayout::c1) |
            (static_cast<std::size_t>(channel_code(ch2))
             << RegisterLayout::c2);
        state.amp[idx] = std::sqrt(w);
      }
    }
  }
  return state;
}

std::vector<Gate> collision_circuit(double lambda, double c) {
  if (lambda < 0.0 || c < 0.0) {
    throw std::invalid_argument("collision_circuit: negative rate");
  }
  const double split = c * lambda / 2.0;  // per-ordering split probability
  if (split > 0.5 + 1e-12) {
    throw std::invalid_argument(
        "collision_circuit: split probability C*lambda/2 above one half; "
        "each right-left configuration couples to a single channel copy, "
        "which caps the representable rate");
  }
  const double theta = angle_from_probability(std::min(c * lambda / 8.0, 1.0));
  const double phi = angle_from_probability(std::min(c * lambda, 1.0));

  constexpr int a = RegisterLayout::ancilla;
  constexpr int c3_lo = RegisterLayout::c3, c3_hi = RegisterLayout::c3 + 1;
  constexpr int c2_lo = RegisterLayout::c2, c2_hi = RegisterLayout::c2 + 1;
  constexpr int c1_lo = RegisterLayout::c1, c1_hi = RegisterLayout::c1 + 1;

  std::vector<Gate> gates;
  // Box A: copy c1 into c3 (the encoder leaves c3 at |00>).
  gates.push_back({"x", c3_hi, 0.0, {{c1_hi, true}}});
  gates.push_back({"x", c3_lo, 0.0, {{c1_lo, true}}});

  // Box B: on the rest-rest configuration, split the copy into an equal
  // right/left superposition carrying probability s = C*lambda/8.
  const std::vector<Control> both_rest = {
      {c1_hi, false}, {c1_lo, false}, {c2_hi, false}, {c2_lo, false}};
  gates.push_back({"x", a, 0.0, both_rest});
  gates.push_back({"ry", c3_lo, theta, {{a, true}}});
  gates.push_back(
      {"h", c3_hi, 0.0, {{c1_hi, false}, {c1_lo, false}, {c3_lo, true}}});
  gates.push_back(
      {"x", c3_lo, 0.0, {{c1_hi, false}, {c1_lo, false}, {c3_hi, true}}});
  gates.push_back({"x", a, 0.0, both_rest});

  // Box C1: the (c1=left, c2=right) configuration rotates its copied left
  // channel into rest with probability q = C*lambda.
  const std::vector<Control> left_right = {
      {c1_hi, true}, {c1_lo, false}, {c2_hi, false}, {c2_lo, true}};
  gates.push_back({"x", a, 0.0, left_right});
  gates.push_back(
      {"ry", c3_hi, phi, {{c1_hi, true}, {c1_lo, false}, {a, true}}});
  gates.push_back({"x", a, 0.0, left_right});

  // Box C2: mirrored for (c1=right, c2=left), targeting the low copy bit.
  const std::vector<Control> right_left = {
      {c1_hi, false}, {c1_lo, true}, {c2_hi, true}, {c2_lo, false}};
  gates.push_back({"x", a, 0.0, right_left});
  gates.push_back(
      {"ry", c3_lo, phi, {{c1_hi, false}, {c1_lo, true}, {a, true}}});
  gates.push_back({"x", a, 0.0, right_left});

  return gates;
}

void propagate(QuantumState& state) {
  const int length = state.layout.length();
  const std::size_t site_mask =
      (std::size_t{1} * (length - 1)) << RegisterLayout::lattice;
  std::vector<std::complex<double>> out(state.amp.size(), {0.0, 0.0});

  for (std::size_t idx = 0; idx < state.amp.size(); ++idx) {
    if (state.amp[idx] == std::complex<double>{}) continue;
    const int code = static_cast<int>((idx >> RegisterLayout::c3) & 0b11);
    int l = static_cast<int>(idx >> RegisterLayout::lattice);
    if (code == kRight) {
      l = (l + 1) & (length - 1);
    } else if (code == kLeft) {
      l = (l + length - 1) & (length - 1);
    }
    const std::size_t moved =
        (idx & ~site_mask) | (std::size_t{1} * l << RegisterLayout::lattice);
    out[moved] = state.amp[idx];
  }
  state.amp.swap(out);
}

namespace {

// (site, channel) probabilities of the c3 marginal, plus any weight on the
// unused code.
std::pair<std::vector<double>, double> c3_marginal(const QuantumState& state) {
  const int length = state.layout.length();
  std::vector<double> prob(static_cast<std::size_t>(length) * 3, 0.0);
  double leaked = 0.0;
  for (std::size_t idx = 0; idx < state.amp.size(); ++idx) {
    const double p = std::norm(state.amp[idx]);
    if (p == 0.0) continue;
    const int code = static_cast<int>((idx >> RegisterLayout::c3) & 0b11);
    const int ch = code_channel(code);
    if (ch < 0) {
      leaked += p;
      continue;
    }
    const auto l = idx >> RegisterLayout::lattice;
    prob[static_cast<std::size_t>(ch) * length + l] += p;
  }
  return {std::move(prob), leaked};
}

}  // namespace

FieldState measure_step(const QuantumState& state) {
  const auto [prob, leaked] = c3_marginal(state);
  if (leaked > 1e-12) {
    throw std::logic_error("measure_step: weight on the unused channel code");
  }
  double total = 0.0;
  for (double p : prob) total += p;
  if (!(total > 0.0)) {
    throw std::invalid_argument("measure_step: zero total marginal");
  }

  const int length = state.layout.length();
  auto field = make_field(Model::d1q3, length);
  for (int ch = 0; ch < 3; ++ch) {
    for (int l = 0; l < length; ++l) {
      field.at(ch, l) =
          prob[static_cast<std::size_t>(ch) * length + l] * state.mass;
    }
  }
  return field;
}

FieldState measure_step_shots(const QuantumState& state, long long shots,
                              std::uint64_t seed) {
  if (shots <= 0) {
    throw std::invalid_argument("measure_step_shots: need a positive count");
  }
  const auto [prob, leaked] = c3_marginal(state);
  if (leaked > 1e-12) {
    throw std::logic_error(
        "measure_step_shots: weight on the unused channel code");
  }
  std::vector<double> cumulative(prob.size());
  double total = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    total += prob[i];
    cumulative[i] = total;
  }
  if (!(total > 0.0)) {
    throw std::invalid_argument("measure_step_shots: zero total marginal");
  }

  std::mt19937_64 rng(seed);
  std::vector<long long> hits(prob.size(), 0);
  for (long long s = 0; s < shots; ++s) {
    const double r =
        static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
    const auto it =
        std::upper_bound(cumulative.begin(), cumulative.end(), r);
    const auto bin = static_cast<std::size_t>(
        std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                 static_cast<std::ptrdiff_t>(prob.size()) - 1));
    ++hits[bin];
  }

  const int length = state.layout.length();
  auto field = make_field(Model::d1q3, length);
  const double scale = state.mass * total / static_cast<double>(shots);
  for (int ch = 0; ch < 3; ++ch) {
    for (int l = 0; l < length; ++l) {
      field.at(ch, l) =
          scale * static_cast<double>(
                      hits[static_cast<std::size_t>(ch) * length + l]);
    }
  }
  return field;
}

FieldState qflga_step(const FieldState& field, double lambda, double c) {
  QuantumState state = encode(field);
  const auto gates = collision_circuit(lambda, c);
  apply_circuit(state, gates);
  propagate(state);
  return measure_step(state);
}

}  // namespace flga
