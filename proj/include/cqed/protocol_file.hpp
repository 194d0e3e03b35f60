#pragma once
// Line-oriented protocol description format.
//
//   # comment
//   atom e                  exactly once, first non-comment line
//   mode A 0+2i             one per mode; order defines the mode index
//   ramsey 0.25pi           angle: <decimal> radians or <decimal>pi
//   disperse A 0.5pi
//   detect e                optional, must be the last step

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cqed/protocol.hpp"

namespace cqed {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

ProtocolSpec parse_protocol(std::string_view text);
ProtocolSpec load_protocol(const std::string& path);

/// Inverse of parse_protocol: parse(print(spec)) == spec bit for bit.
std::string print_protocol(const ProtocolSpec& spec);

/// Complex literal: `a`, `bi`, `a+bi`, `a-bi` (decimal a, b; `i` alone means 1).
Amplitude parse_complex(std::string_view token);
/// Angle literal: `<decimal>` radians or `<decimal>pi`.
double parse_angle(std::string_view token);

std::string format_complex(Amplitude z);
std::string format_angle(double radians);
/// Shortest round-trip representation of a double.
std::string format_double(double value);

}  // namespace cqed
