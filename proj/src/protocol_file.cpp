#include "cqed/protocol_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace cqed {

namespace {

struct LiteralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_decimal(std::string_view text) {
  std::string_view body = text;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  if (body.empty() || body.front() == '+') throw LiteralError("malformed number '" + std::string(text) + "'");
  double value = 0.0;
  const auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc() || end != body.data() + body.size() || !std::isfinite(value)) {
    throw LiteralError("malformed number '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

AtomicLevel parse_level(std::string_view token, std::size_t line) {
  if (token == "g") return AtomicLevel::g;
  if (token == "e") return AtomicLevel::e;
  throw ParseError(line, "atomic level must be 'g' or 'e', got '" + std::string(token) + "'");
}

void expect_args(const std::vector<std::string_view>& tokens, std::size_t count, std::size_t line,
                 const char* usage) {
  if (tokens.size() != count) throw ParseError(line, std::string("expected '") + usage + "'");
}

}  // namespace

Amplitude parse_complex(std::string_view token) {
  if (token.empty()) throw LiteralError("empty complex literal");
  if (token.back() != 'i') return {parse_decimal(token), 0.0};

  const std::string_view body = token.substr(0, token.size() - 1);
  std::size_t split = std::string_view::npos;
  for (std::size_t pos = body.size(); pos-- > 1;) {
    if ((body[pos] == '+' || body[pos] == '-') && body[pos - 1] != 'e' && body[pos - 1] != 'E') {
      split = pos;
      break;
    }
  }
  const std::string_view real_text = split == std::string_view::npos ? std::string_view{} : body.substr(0, split);
  const std::string_view imag_text = split == std::string_view::npos ? body : body.substr(split);

  double imag = 0.0;
  if (imag_text.empty() || imag_text == "+") {
    imag = 1.0;
  } else if (imag_text == "-") {
    imag = -1.0;
  } else {
    imag = parse_decimal(imag_text);
  }
  const double real = real_text.empty() ? 0.0 : parse_decimal(real_text);
  return {real, imag};
}

double parse_angle(std::string_view token) {
  if (token.size() >= 2 && token.substr(token.size() - 2) == "pi") {
    const std::string_view factor = token.substr(0, token.size() - 2);
    if (factor.empty() || factor == "+") return kPi;
    if (factor == "-") return -kPi;
    return parse_decimal(factor) * kPi;
  }
  return parse_decimal(token);
}

std::string format_double(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ec == std::errc() ? end : buffer);
}

std::string format_complex(Amplitude z) {
  std::string out = format_double(z.real());
  const std::string imag = format_double(z.imag());
  out += std::signbit(z.imag()) ? imag : "+" + imag;
  return out + "i";
}

std::string format_angle(double radians) {
  if (radians == 0.0 && !std::signbit(radians)) return "0";
  const std::string factor = format_double(radians / kPi);
  if (parse_decimal(factor) * kPi == radians) return factor + "pi";
  return format_double(radians);
}

ProtocolSpec parse_protocol(std::string_view text) {
  ProtocolSpec spec;
  bool have_atom = false;
  bool detected = false;
  std::size_t line_no = 0;

  auto mode_index = [&](std::string_view name, std::size_t line) {
    const auto it = std::find(spec.mode_names.begin(), spec.mode_names.end(), name);
    if (it == spec.mode_names.end()) {
      throw ParseError(line, "mode '" + std::string(name) + "' referenced before declaration");
    }
    return static_cast<std::size_t>(it - spec.mode_names.begin());
  };

  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t stop = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, stop - start);
    start = stop + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;

    const std::string_view keyword = tokens.front();
    if (!have_atom && keyword != "atom") {
      throw ParseError(line_no, "expected 'atom (g|e)' as the first statement");
    }
    if (detected) throw ParseError(line_no, "Detect must be final");

    try {
      if (keyword == "atom") {
        if (have_atom) throw ParseError(line_no, "duplicate atom line");
        expect_args(tokens, 2, line_no, "atom (g|e)");
        spec.atom_init = parse_level(tokens[1], line_no);
        have_atom = true;
      } else if (keyword == "mode") {
        expect_args(tokens, 3, line_no, "mode <name> <complex>");
        const std::string name(tokens[1]);
        if (std::find(spec.mode_names.begin(), spec.mode_names.end(), name) != spec.mode_names.end()) {
          throw ParseError(line_no, "duplicate mode '" + name + "'");
        }
        spec.mode_init.push_back(parse_complex(tokens[2]));
        spec.mode_names.push_back(name);
      } else if (keyword == "ramsey") {
        expect_args(tokens, 2, line_no, "ramsey <angle>");
        spec.steps.emplace_back(RamseyStep{parse_angle(tokens[1])});
      } else if (keyword == "disperse") {
        expect_args(tokens, 3, line_no, "disperse <mode> <angle>");
        const std::size_t mode = mode_index(tokens[1], line_no);
        spec.steps.emplace_back(DispersiveStep{mode, parse_angle(tokens[2])});
      } else if (keyword == "detect") {
        expect_args(tokens, 2, line_no, "detect (g|e)");
        spec.steps.emplace_back(DetectStep{parse_level(tokens[1], line_no)});
        detected = true;
      } else {
        throw ParseError(line_no, "unknown keyword '" + std::string(keyword) + "'");
      }
    } catch (const LiteralError& e) {
      throw ParseError(line_no, e.what());
    }
  }

  if (!have_atom) throw ParseError(line_no, "missing 'atom' statement");
  if (spec.mode_init.empty()) throw ParseError(line_no, "no modes declared");
  return spec;
}

ProtocolSpec load_protocol(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open protocol file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_protocol(buffer.str());
}

std::string print_protocol(const ProtocolSpec& spec) {
  spec.validate();
  auto name_of = [&](std::size_t k) {
    return k < spec.mode_names.size() ? spec.mode_names[k] : "m" + std::to_string(k);
  };
  std::ostringstream os;
  os << "atom " << to_string(spec.atom_init) << '\n';
  for (std::size_t k = 0; k < spec.modes(); ++k) {
    os << "mode " << name_of(k) << ' ' << format_complex(spec.mode_init[k]) << '\n';
  }
  for (const auto& step : spec.steps) {
    if (const auto* r = std::get_if<RamseyStep>(&step)) {
      os << "ramsey " << format_angle(r->theta) << '\n';
    } else if (const auto* d = std::get_if<DispersiveStep>(&step)) {
      os << "disperse " << name_of(d->mode) << ' ' << format_angle(d->phi) << '\n';
    } else {
      os << "detect " << to_string(std::get<DetectStep>(step).level) << '\n';
    }
  }
  return os.str();
}

}  // namespace cqed
