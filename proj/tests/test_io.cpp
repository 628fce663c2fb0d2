#include <gtest/gtest.h>

#include <filesystem>

#include "modspace/io.hpp"

using namespace modspace;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "modspace_io_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Io, FieldRoundTrip) {
  const GridSpec g = make_grid(2, 2, 8);
  const Field f = Field::sample(g, [](const std::array<double, 3>& x) {
    return std::exp(cplx(0.1 * x[0], x[1])) / 3.0;
  });
  const auto path = scratch("roundtrip.json");
  io::save_field(path, f);
  const Field back = io::load_field(path);
  EXPECT_EQ(back.grid(), g);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(back[i], f[i]);
}

TEST(Io, SchemaKeysAndOrder) {
  const Field f = Field::zeros(make_grid(1, 1, 8));
  const auto doc = io::to_json(f);
  std::vector<std::string> keys;
  for (auto it = doc.begin(); it != doc.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"n", "P", "M", "samples"}));
  EXPECT_EQ(doc["samples"].size(), 8u);
}

TEST(Io, RejectsMalformedDocuments) {
  auto kind_of = [](const std::string& text) {
    try {
      io::field_from_json(io::json::parse(text));
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidArgument;
  };
  EXPECT_EQ(kind_of(R"({"n":1,"P":1,"samples":[]})"), ErrorKind::Format);
  EXPECT_EQ(kind_of(R"({"n":1,"P":1,"M":7,"samples":[]})"), ErrorKind::Format);
  EXPECT_EQ(kind_of(R"({"n":1,"P":1,"M":8,"samples":[[0,0]]})"), ErrorKind::Format);
  EXPECT_EQ(kind_of(R"({"n":1.5,"P":1,"M":8,"samples":[]})"), ErrorKind::Format);
  EXPECT_EQ(kind_of(R"({"n":1,"P":1,"M":8,"samples":[[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0]]})"),
            ErrorKind::Format);
  EXPECT_EQ(kind_of(R"([1,2])"), ErrorKind::Format);
}

TEST(Io, LoadErrors) {
  try {
    io::load_field(scratch("missing.json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
  io::write_text(scratch("broken.json"), "{\"n\": 1, ");
  try {
    io::load_field(scratch("broken.json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Format);
  }
}

TEST(Io, CsvFormatting) {
  const std::string csv = io::to_csv({"a", "b"}, {{1.0, 0.1}, {-2.5, 1e-20}});
  EXPECT_EQ(csv, "a,b\n1,0.10000000000000001\n-2.5,9.9999999999999995e-21\n");
}

TEST(Io, ReportJsonOmitsRuntimeByDefault) {
  ProbeReport rep;
  rep.probe = "x";
  rep.checks.push_back(make_check("c", SlopeFit{1.0, 0.0, 0.0}, 1.05, 0.1, "basis"));
  rep.finalize();
  rep.runtime_seconds = 3.0;
  const auto doc = io::to_json(rep);
  EXPECT_FALSE(doc.contains("runtime_seconds"));
  EXPECT_EQ(doc["verdict"], "Consistent");
  EXPECT_TRUE(io::to_json(rep, true).contains("runtime_seconds"));
}
