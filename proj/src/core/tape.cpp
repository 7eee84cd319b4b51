#include "ncolab/core/tape.hpp"

#include <cmath>
#include <string>

#include "ncolab/core/error.hpp"

namespace ncolab::core {

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Input: return "input";
    case Op::Const: return "const";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Neg: return "neg";
    case Op::AddConst: return "add_const";
    case Op::MulConst: return "mul_const";
    case Op::DivConst: return "div_const";
    case Op::ConstDiv: return "const_div";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tanh: return "tanh";
    case Op::Relu: return "relu";
    case Op::Sqrt: return "sqrt";
    case Op::Square: return "square";
  }
  return "unknown";
}

Var Tape::input(double v) { return record(Op::Input, kNone, kNone, v); }

Var Tape::constant(double v) { return record(Op::Const, kNone, kNone, v); }

void Tape::set_input(Var x, double v) {
  if (nodes_[x.index].op != Op::Input) {
    throw Error("Tape::set_input called on a non-input node");
  }
  nodes_[x.index].c = v;
}

void Tape::clear() {
  nodes_.clear();
  adjoints_.clear();
}

Var Tape::record(Op op, std::uint32_t a, std::uint32_t b, double c) {
  Node n{op, a, b, c, 0.0, 0.0, 0.0};
  evaluate(n);
  nodes_.push_back(n);
  return Var{this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

void Tape::evaluate(Node& n) const {
  const double x = n.a != kNone ? nodes_[n.a].value : 0.0;
  const double y = n.b != kNone ? nodes_[n.b].value : 0.0;
  switch (n.op) {
    case Op::Input:
    case Op::Const:
      n.value = n.c;
      break;
    case Op::Add:
      n.value = x + y;
      n.da = 1.0;
      n.db = 1.0;
      break;
    case Op::Sub:
      n.value = x - y;
      n.da = 1.0;
      n.db = -1.0;
      break;
    case Op::Mul:
      n.value = x * y;
      n.da = y;
      n.db = x;
      break;
    case Op::Div:
      n.value = x / y;
      n.da = 1.0 / y;
      n.db = -n.value / y;
      break;
    case Op::Neg:
      n.value = -x;
      n.da = -1.0;
      break;
    case Op::AddConst:
      n.value = x + n.c;
      n.da = 1.0;
      break;
    case Op::MulConst:
      n.value = x * n.c;
      n.da = n.c;
      break;
    case Op::DivConst:
      n.value = x / n.c;
      n.da = 1.0 / n.c;
      break;
    case Op::ConstDiv:
      n.value = n.c / x;
      n.da = -n.value / x;
      break;
    case Op::Sin:
      n.value = std::sin(x);
      n.da = std::cos(x);
      break;
    case Op::Cos:
      n.value = std::cos(x);
      n.da = -std::sin(x);
      break;
    case Op::Tanh:
      n.value = std::tanh(x);
      n.da = 1.0 - n.value * n.value;
      break;
    case Op::Relu:
      n.value = x > 0.0 ? x : 0.0;
      n.da = x > 0.0 ? 1.0 : 0.0;
      break;
    case Op::Sqrt:
      n.value = std::sqrt(x);
      n.da = 0.5 / n.value;
      break;
    case Op::Square:
      n.value = x * x;
      n.da = 2.0 * x;
      break;
  }
}

void Tape::replay() {
  for (auto& n : nodes_) evaluate(n);
}

void Tape::backward(std::span<const Var> outputs, std::span<const double> seeds) {
  adjoints_.assign(nodes_.size(), 0.0);
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    adjoints_[outputs[i].index] += seeds[i];
  }
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    const double g = adjoints_[i];
    if (g == 0.0) continue;
    const Node& n = nodes_[i];
    if (n.a != kNone) adjoints_[n.a] += n.da * g;
    if (n.b != kNone) adjoints_[n.b] += n.db * g;
  }
}

std::optional<std::uint32_t> Tape::first_nonfinite() const {
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    if (!std::isfinite(nodes_[i].value)) return i;
  }
  return std::nullopt;
}

namespace {

Var binary(Op op, Var a, Var b) { return a.tape->record(op, a.index, b.index, 0.0); }
Var unary(Op op, Var a, double c = 0.0) {
  return a.tape->record(op, a.index, Tape::kNone, c);
}

}  // namespace

Var operator+(Var a, Var b) { return binary(Op::Add, a, b); }
Var operator-(Var a, Var b) { return binary(Op::Sub, a, b); }
Var operator*(Var a, Var b) { return binary(Op::Mul, a, b); }
Var operator/(Var a, Var b) { return binary(Op::Div, a, b); }
Var operator-(Var a) { return unary(Op::Neg, a); }
Var operator+(Var a, double c) { return unary(Op::AddConst, a, c); }
Var operator+(double c, Var a) { return unary(Op::AddConst, a, c); }
Var operator-(Var a, double c) { return unary(Op::AddConst, a, -c); }
Var operator-(double c, Var a) { return unary(Op::AddConst, unary(Op::Neg, a), c); }
Var operator*(Var a, double c) { return unary(Op::MulConst, a, c); }
Var operator*(double c, Var a) { return unary(Op::MulConst, a, c); }
Var operator/(Var a, double c) { return unary(Op::DivConst, a, c); }
Var operator/(double c, Var a) { return unary(Op::ConstDiv, a, c); }
Var sin(Var a) { return unary(Op::Sin, a); }
Var cos(Var a) { return unary(Op::Cos, a); }
Var tanh(Var a) { return unary(Op::Tanh, a); }
Var relu(Var a) { return unary(Op::Relu, a); }
Var sqrt(Var a) { return unary(Op::Sqrt, a); }
Var square(Var a) { return unary(Op::Square, a); }

std::pair<double, Eigen::VectorXd> value_and_grad(const RecordedFn& f,
                                                  std::span<const double> params) {
  Tape tape;
  std::vector<Var> vars;
  vars.reserve(params.size());
  for (double p : params) vars.push_back(tape.input(p));
  const Var out = f(tape, vars);
  if (auto bad = tape.first_nonfinite()) {
    throw NumericalError("non-finite value produced by op '" +
                         std::string(op_name(tape.op_at(*bad))) + "' at tape node " +
                         std::to_string(*bad));
  }
  tape.backward(out);
  Eigen::VectorXd grad(static_cast<Eigen::Index>(params.size()));
  for (std::size_t i = 0; i < vars.size(); ++i) {
    grad[static_cast<Eigen::Index>(i)] = tape.adjoint(vars[i]);
  }
  return {out.value(), grad};
}

}  // namespace ncolab::core
