#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ncolab::core {

class Tape;

/// Primitive operations understood by the tape. The set is deliberately the
/// handful needed by the dynamics, the cost functionals and the networks.
enum class Op : std::uint8_t {
  Input,
  Const,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  AddConst,
  MulConst,
  DivConst,  // a / c
  ConstDiv,  // c / a
  Sin,
  Cos,
  Tanh,
  Relu,
  Sqrt,
  Square,
};

std::string_view op_name(Op op);

/// Handle to a scalar recorded on a Tape. Cheap to copy; only valid while the
/// owning tape is alive and has not been cleared.
struct Var {
  Tape* tape = nullptr;
  std::uint32_t index = 0;

  double value() const;
};

/// Reverse-mode gradient tape over scalars.
///
/// Each recorded node stores its op code, operands, the forward value and the
/// local partial derivatives. `backward` sweeps the list once in reverse.
class Tape {
 public:
  static constexpr std::uint32_t kNone = 0xffffffffu;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var input(double v);
  Var constant(double v);

  /// Overwrites the value of an input node; takes effect on the next replay().
  void set_input(Var x, double v);

  double value(Var x) const { return nodes_[x.index].value; }
  std::size_t size() const { return nodes_.size(); }

  /// Drops all nodes but keeps allocated capacity.
  void clear();
  void reserve(std::size_t n) { nodes_.reserve(n); }

  /// Recomputes every node from the inputs in recording order.
  void replay();

  /// Seeds d(output)/d(output) = seed for each output and propagates to all
  /// nodes. Previous adjoints are discarded.
  void backward(std::span<const Var> outputs, std::span<const double> seeds);
  void backward(Var output) {
    const double one = 1.0;
    backward(std::span<const Var>(&output, 1), std::span<const double>(&one, 1));
  }

  /// Adjoint of a node after the last backward().
  double adjoint(Var x) const { return adjoints_[x.index]; }

  /// Index of the first node whose value is NaN or infinite.
  std::optional<std::uint32_t> first_nonfinite() const;
  Op op_at(std::uint32_t i) const { return nodes_[i].op; }

  Var record(Op op, std::uint32_t a, std::uint32_t b, double c);

 private:
  struct Node {
    Op op;
    std::uint32_t a;
    std::uint32_t b;
    double c;
    double value;
    double da;
    double db;
  };

  void evaluate(Node& n) const;

  std::vector<Node> nodes_;
  std::vector<double> adjoints_;
};

inline double Var::value() const { return tape->value(*this); }

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);
Var operator-(Var a);
Var operator+(Var a, double c);
Var operator+(double c, Var a);
Var operator-(Var a, double c);
Var operator-(double c, Var a);
Var operator*(Var a, double c);
Var operator*(double c, Var a);
Var operator/(Var a, double c);
Var operator/(double c, Var a);
Var sin(Var a);
Var cos(Var a);
Var tanh(Var a);
Var relu(Var a);
Var sqrt(Var a);
Var square(Var a);

inline Var& operator+=(Var& a, Var b) { return a = a + b; }
inline Var& operator-=(Var& a, Var b) { return a = a - b; }
inline Var& operator*=(Var& a, Var b) { return a = a * b; }
inline Var& operator+=(Var& a, double b) { return a = a + b; }

inline double relu(double a) { return a > 0.0 ? a : 0.0; }
inline double square(double a) { return a * a; }

/// Forward value of either a plain double or a tape variable.
inline double value_of(double x) { return x; }
inline double value_of(Var x) { return x.value(); }

/// Constant of the same scalar kind as `like` (on the same tape for Var).
inline double constant_like(double, double v) { return v; }
inline Var constant_like(Var like, double v) { return like.tape->constant(v); }

/// A scalar function recorded on a tape: receives the tape and the parameter
/// variables and returns the scalar output.
using RecordedFn = std::function<Var(Tape&, std::span<const Var>)>;

/// Evaluates f at params and returns its value and gradient by one reverse
/// sweep. Throws NumericalError naming the first op that produced a
/// non-finite value.
std::pair<double, Eigen::VectorXd> value_and_grad(const RecordedFn& f,
                                                  std::span<const double> params);

}  // namespace ncolab::core
