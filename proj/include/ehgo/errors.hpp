#pragma once

#include <stdexcept>
#include <string>

namespace ehgo {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularOrientation : public Error {
 public:
  using Error::Error;
};

class NegativeThrust : public Error {
 public:
  using Error::Error;
};

class RankDeficientMixer : public Error {
 public:
  using Error::Error;
};

class DegenerateForcing : public Error {
 public:
  using Error::Error;
};

class NotHurwitz : public Error {
 public:
  NotHurwitz(std::string block, double root_real, double root_imag)
      : Error("characteristic polynomial of block '" + block +
              "' is not Hurwitz: root " + std::to_string(root_real) +
              (root_imag >= 0 ? "+" : "") + std::to_string(root_imag) + "i"),
        block_(std::move(block)),
        root_real_(root_real),
        root_imag_(root_imag) {}

  const std::string& block() const { return block_; }
  double root_real() const { return root_real_; }
  double root_imag() const { return root_imag_; }

 private:
  std::string block_;
  double root_real_;
  double root_imag_;
};

class IllConditioned : public Error {
 public:
  using Error::Error;
};

/// A simulated state left the admissible region (norm above the divergence
/// guard, a non-finite value, or an Euler singularity).
class Diverged : public Error {
 public:
  Diverged(long step, double t, const std::string& what)
      : Error("diverged at step " + std::to_string(step) + " (t=" +
              std::to_string(t) + "): " + what),
        step_(step),
        t_(t) {}

  long step() const { return step_; }
  double t() const { return t_; }

 private:
  long step_;
  double t_;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, std::string constraint)
      : Error(field + " must satisfy " + constraint),
        field_(std::move(field)),
        constraint_(std::move(constraint)) {}

  const std::string& field() const { return field_; }
  const std::string& constraint() const { return constraint_; }

 private:
  std::string field_;
  std::string constraint_;
};

}  // namespace ehgo
