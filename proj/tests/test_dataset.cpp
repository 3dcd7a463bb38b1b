#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cad/dataset.hpp"
#include "cad/errors.hpp"
#include "cad/fixture.hpp"

using namespace cad;

namespace {

const std::string kHeader =
    "Age,DM,HTN,BP,Typical Chest Pain,Atypical,Nonanginal,Tinversion,FBS,ESR,K,EF-TTE,Region RWMA,Cath";

Dataset parse(const std::string& text, const LoadOptions& opt = {}) {
  std::istringstream in(text);
  return parse_dataset(in, cad12_schema(), opt);
}

} // namespace

TEST_CASE("aliases, Y/N cells and label text") {
  const auto d = parse(kHeader + "\n53,1,Y,110,N,0,0,N,90,7,4.7,50,0,Cad\n67,0,N,132,1,0,0,Y,82,8,4.4,40,4,Normal\n");
  REQUIRE(d.size() == 2);
  CHECK(d.records[0].label == 1);
  CHECK(d.records[1].label == 0);
  CHECK(d.records[0].values[*d.schema.index_of("HTN")] == 1.0);
  CHECK(d.records[1].values[*d.schema.index_of("Tinversion")] == 1.0);
  CHECK(d.records[1].values[*d.schema.index_of("RegionRWMA")] == 4.0);
  CHECK(d.class_counts() == std::array<std::size_t, 2>{1, 1});
}

TEST_CASE("column order in the file does not matter") {
  const auto d = parse("Cath,EF-TTE,Age,DM,HTN,BP,TypicalChestPain,Atypical,Nonanginal,Tinversion,FBS,ESR,K,RegionRWMA\n"
                       "Cad,50,53,1,1,110,0,0,0,0,90,7,4.7,0\n");
  CHECK(d.records[0].values[0] == 53);
  CHECK(d.records[0].values[*d.schema.index_of("EF-TTE")] == 50);
}

TEST_CASE("load errors name the problem") {
  CHECK_THROWS_WITH_AS(parse(kHeader + "\n"), doctest::Contains("empty dataset"), DataError);
  CHECK_THROWS_WITH_AS(parse(""), doctest::Contains("empty"), DataError);
  std::string no_ef = "Age,DM,HTN,BP,TypicalChestPain,Atypical,Nonanginal,Tinversion,FBS,ESR,K,RegionRWMA,Cath\n"
                      "53,1,1,110,0,0,0,0,90,7,4.7,0,Cad\n";
  CHECK_THROWS_WITH_AS(parse(no_ef), doctest::Contains("EF-TTE"), DataError);
  CHECK_THROWS_WITH_AS(parse(kHeader + "\n53,1,1,110,0,0,0,0,,7,4.7,50,0,Cad\n"), doctest::Contains("FBS"), DataError);
  CHECK_THROWS_WITH_AS(parse(kHeader + "\n53,1,1,110,0,0,0,0,90,7,4.7,50,0,Maybe\n"), doctest::Contains("label"),
                       DataError);
  CHECK_THROWS_AS(load_dataset("/nonexistent.csv", cad12_schema()), DataError);
}

TEST_CASE("missing cells can be imputed with the column median") {
  LoadOptions opt;
  opt.impute_missing = true;
  const auto d = parse(kHeader + "\n53,1,1,110,0,0,0,0,80,7,4.7,50,0,Cad\n53,1,1,110,0,0,0,0,,7,4.7,50,0,Cad\n"
                                 "53,1,1,110,0,0,0,0,100,7,4.7,50,0,Normal\n",
                       opt);
  CHECK(d.records[1].values[*d.schema.index_of("FBS")] == 90);
}

TEST_CASE("out-of-range values are flagged, not dropped") {
  const auto d = parse(kHeader + "\n53,1,1,500,0,0,0,0,90,7,4.7,50,0,Cad\n");
  CHECK(d.records[0].out_of_range);
  CHECK_NOTHROW(validate_record(d.schema, d.records[0]));
  auto strict = d.records[0];
  strict.out_of_range = false;
  CHECK_THROWS_WITH_AS(validate_record(d.schema, strict), doctest::Contains("90-190"), DataError);
}

TEST_CASE("write then read gives the same dataset") {
  const auto d = make_fixture({50, 0.72, 81, 2});
  std::ostringstream out;
  write_csv(d, out);
  std::istringstream in(out.str());
  const auto back = parse_dataset(in, d.schema);
  CHECK(back.records == d.records);
}

TEST_CASE("record_from_named reports every missing feature") {
  const auto s = cad12_schema();
  std::map<std::string, double> v{{"Age", 50}, {"BP", 120}};
  try {
    record_from_named(s, v);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("EF-TTE") != std::string::npos);
    CHECK(msg.find("FBS") != std::string::npos);
  }
}

TEST_CASE("raw loader infers kinds") {
  std::istringstream in("Sex,Age,Obesity,Cath\nMale,53,Y,Cad\nFmale,67,N,Normal\n");
  const auto d = parse_raw_dataset(in);
  CHECK(d.schema.features[0].kind == FeatureKind::categorical);
  CHECK(d.schema.features[1].kind == FeatureKind::numeric);
  CHECK(d.schema.features[2].kind == FeatureKind::binary);
  CHECK(d.records[0].values[0] == 1); // sorted: Fmale=0, Male=1
}

TEST_CASE("csv line splitting and number formatting") {
  CHECK(split_csv_line("a,\"b,c\",\"d\"\"e\"") == std::vector<std::string>{"a", "b,c", "d\"e"});
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(4.6) == "4.6");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
