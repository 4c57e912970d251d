#include <gtest/gtest.h>

#include <filesystem>

#include "captrans/instance_io.hpp"

using namespace captrans;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "captrans_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(InstanceJson, RoundTripIsExact) {
  const auto in = builtin_example();
  const auto text = to_json(in).dump(2);
  const auto back = instance_from_json(parse_json_text(text, "memory"));
  EXPECT_EQ(to_json(back).dump(2), text);
  EXPECT_EQ(back.machine_count(), in.machine_count());
  EXPECT_EQ(back.items[0].demand, in.items[0].demand);
  EXPECT_EQ(back.costs.carbon_tax, in.costs.carbon_tax);
  EXPECT_EQ(back.technologies[1].machines, in.technologies[1].machines);
}

TEST(InstanceJson, FileRoundTrip) {
  const auto path = scratch("example.json");
  save_instance(builtin_example(), path);
  const auto text = read_text_file(path);
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(to_json(load_instance(path)).dump(2) + "\n", text);
}

TEST(InstanceJson, InvalidValuesAreReported) {
  auto j = to_json(builtin_example());
  j["machines"][0]["mu"] = 0.0;
  j["machines"][1]["pool"] = "existing";
  j["machines"][1]["s0"] = 1;
  j["machines"][1]["RL0"] = -5.0;
  try {
    instance_from_json(j);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_GE(e.violations().size(), 2u);
  }
}

TEST(InstanceJson, StructuralErrorsAreParseErrors) {
  EXPECT_THROW(parse_json_text("{\"schema\": 1,", "memory"), ParseError);
  EXPECT_THROW(instance_from_json(Json::array()), ParseError);
  auto j = to_json(builtin_example());
  j["schema"] = 2;
  EXPECT_THROW(instance_from_json(j), ParseError);
  j = to_json(builtin_example());
  j.erase("costs");
  EXPECT_THROW(instance_from_json(j), ParseError);
  j = to_json(builtin_example());
  j["machines"][0]["technology"] = "steam";
  EXPECT_THROW(instance_from_json(j), ParseError);
  j = to_json(builtin_example());
  j["items"][0]["d"] = "lots";
  EXPECT_THROW(instance_from_json(j), ParseError);
}

TEST(InstanceJson, MissingFileIsIoError) {
  EXPECT_THROW(load_instance(scratch("does_not_exist.json")), IoError);
}
