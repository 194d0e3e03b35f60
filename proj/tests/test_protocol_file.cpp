#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cqed/protocol_file.hpp"

namespace cqed {
namespace {

namespace fs = std::filesystem;
using cplx = std::complex<double>;

const fs::path kData = CQED_TEST_DATA;

std::vector<fs::path> corpus(const char* subdir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(kData / subdir)) {
    if (entry.path().extension() == ".proto") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::size_t error_line(std::string_view text) {
  try {
    parse_protocol(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

std::string error_message(std::string_view text) {
  try {
    parse_protocol(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

TEST(ParseProtocol, CanonicalFile) {
  const auto spec = load_protocol((kData / "valid" / "canonical_e.proto").string());
  EXPECT_EQ(spec, canonical_spec(AtomicLevel::e, 2.0, AtomicLevel::e));
  EXPECT_EQ(spec.mode_names, (std::vector<std::string>{"A", "B", "C", "D"}));
}

TEST(ParseProtocol, UndeclaredModeNamesLineAndSymbol) {
  const std::string text = "atom e\nmode A 2i\nramsey 0.25pi\ndisperse E 0.5pi\n";
  EXPECT_EQ(error_line(text), 4u);
  EXPECT_NE(error_message(text).find("'E'"), std::string::npos);
}

TEST(ParseProtocol, DetectMustBeFinal) {
  const std::string text = "atom e\nmode A 2i\ndetect e\nramsey 0.25pi\n";
  EXPECT_EQ(error_line(text), 4u);
  EXPECT_NE(error_message(text).find("Detect must be final"), std::string::npos);
}

TEST(ParseProtocol, DuplicateAtom) {
  EXPECT_EQ(error_line("atom e\n# c\natom g\nmode A 1\n"), 3u);
  EXPECT_NE(error_message("atom e\natom g\n").find("duplicate atom"), std::string::npos);
}

TEST(ParseProtocol, UnknownKeyword) {
  EXPECT_EQ(error_line("atom e\nmode A 1\nwait 3\n"), 3u);
}

TEST(ParseProtocol, MalformedLiteralsReportLine) {
  EXPECT_EQ(error_line("atom e\nmode A 1+\n"), 2u);
  EXPECT_EQ(error_line("atom e\nmode A 1\nramsey 0.25p\n"), 3u);
  EXPECT_EQ(error_line("atom e\nmode A 1\ndisperse A xpi\n"), 3u);
}

TEST(ParseProtocol, StructuralErrors) {
  EXPECT_EQ(error_line("mode A 1\natom e\n"), 1u);
  EXPECT_NE(error_message("").find("missing 'atom'"), std::string::npos);
  EXPECT_NE(error_message("atom g\n").find("no modes"), std::string::npos);
}

TEST(ParseProtocol, WindowsLineEndings) {
  const auto spec = parse_protocol("atom g\r\nmode A 2\r\nramsey 0.25pi\r\n");
  EXPECT_EQ(spec.atom_init, AtomicLevel::g);
  EXPECT_EQ(spec.steps.size(), 1u);
}

TEST(ComplexLiteral, Forms) {
  EXPECT_EQ(parse_complex("2"), cplx(2, 0));
  EXPECT_EQ(parse_complex("-1.5"), cplx(-1.5, 0));
  EXPECT_EQ(parse_complex("2i"), cplx(0, 2));
  EXPECT_EQ(parse_complex("-2i"), cplx(0, -2));
  EXPECT_EQ(parse_complex("0+2i"), cplx(0, 2));
  EXPECT_EQ(parse_complex("0-2i"), cplx(0, -2));
  EXPECT_EQ(parse_complex("1.25-0.5i"), cplx(1.25, -0.5));
  EXPECT_EQ(parse_complex("i"), cplx(0, 1));
  EXPECT_EQ(parse_complex("-i"), cplx(0, -1));
  EXPECT_EQ(parse_complex("3+i"), cplx(3, 1));
  EXPECT_EQ(parse_complex("1e-3+2.5e0i"), cplx(1e-3, 2.5));
}

TEST(ComplexLiteral, Rejects) {
  for (const char* bad : {"", "+", "i2", "2+i3", "2ii", "1+2", "nan", "inf", "1+-2i", "abc", "2j"}) {
    EXPECT_ANY_THROW(parse_complex(bad)) << bad;
  }
}

TEST(AngleLiteral, Forms) {
  EXPECT_EQ(parse_angle("0.25pi"), 0.25 * kPi);
  EXPECT_EQ(parse_angle("pi"), kPi);
  EXPECT_EQ(parse_angle("-pi"), -kPi);
  EXPECT_EQ(parse_angle("1.5"), 1.5);
  EXPECT_EQ(parse_angle("-0.5pi"), -0.5 * kPi);
}

TEST(AngleLiteral, Rejects) {
  for (const char* bad : {"", "p", "0.25 pi", "pi2", "1.5rad", "nanpi"}) {
    EXPECT_ANY_THROW(parse_angle(bad)) << bad;
  }
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_angle(0.25 * kPi), "0.25pi");
  EXPECT_EQ(format_complex(cplx(0, 2)), "0+2i");
  EXPECT_EQ(format_complex(cplx(1.5, -0.25)), "1.5-0.25i");
  for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 6.02e23, kPi}) {
    EXPECT_EQ(parse_angle(format_angle(x)), x);
  }
}

TEST(Corpus, HasEnoughFiles) {
  EXPECT_GE(corpus("valid").size(), 20u);
  EXPECT_GE(corpus("invalid").size(), 10u);
}

TEST(Corpus, ValidFilesRoundTrip) {
  for (const auto& path : corpus("valid")) {
    SCOPED_TRACE(path.filename().string());
    const auto spec = load_protocol(path.string());
    const auto printed = print_protocol(spec);
    const auto again = parse_protocol(printed);
    EXPECT_EQ(again, spec);
    EXPECT_EQ(print_protocol(again), printed);
  }
}

TEST(Corpus, InvalidFilesFailWithLineNumbers) {
  for (const auto& path : corpus("invalid")) {
    SCOPED_TRACE(path.filename().string());
    try {
      load_protocol(path.string());
      ADD_FAILURE() << "parsed without error";
    } catch (const ParseError& e) {
      EXPECT_GE(e.line(), 1u);
      EXPECT_EQ(std::string(e.what()).rfind("line ", 0), 0u);
    }
  }
}

TEST(RoundTrip, RandomSpecs) {
  std::mt19937_64 gen(51);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    ProtocolSpec spec;
    spec.atom_init = i % 2 ? AtomicLevel::g : AtomicLevel::e;
    const std::size_t modes = 1 + i % 4;
    for (std::size_t k = 0; k < modes; ++k) {
      spec.mode_init.emplace_back(u(gen), u(gen));
      spec.mode_names.push_back("m" + std::to_string(k));
    }
    for (int s = 0; s < 6; ++s) {
      if (s % 3 == 0) {
        spec.steps.push_back(RamseyStep{u(gen)});
      } else {
        spec.steps.push_back(DispersiveStep{static_cast<std::size_t>(s) % modes, s == 4 ? 0.5 * kPi : u(gen)});
      }
    }
    if (i % 3 == 0) spec.steps.push_back(DetectStep{AtomicLevel::e});
    EXPECT_EQ(parse_protocol(print_protocol(spec)), spec);
  }
}

TEST(LoadProtocol, MissingFileThrows) {
  EXPECT_ANY_THROW(load_protocol((kData / "does_not_exist.proto").string()));
}

}  // namespace
}  // namespace cqed
