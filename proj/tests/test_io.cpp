#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "kgw/io.hpp"

using namespace kgw;

TEST(Io, DoublesRoundTrip)
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) EXPECT_EQ(std::stod(format_double(v)), v);
    EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "null");
}

TEST(Io, DocumentCarriesSchema)
{
    const auto d = document("wave", Json{{"a", 1.5}});
    EXPECT_EQ(d["schema"], "1");
    EXPECT_EQ(d["kind"], "wave");
    const auto text = dump_json(d);
    EXPECT_NE(text.find("\"schema\": \"1\""), std::string::npos);
    EXPECT_EQ(Json::parse(text)["result"]["a"].get<double>(), 1.5);
}

TEST(Io, IdenticalInputsGiveIdenticalBytes)
{
    const PotentialSpec s{Family::phi4n, 2};
    auto run = [&]() {
        const auto g = d_second(s, 0.3, 10.0);
        const auto w = construct_profile(solve_beta(s, 0.3, 10.0), s, 128);
        Json j = {{"gss", to_json(g)}, {"wave", to_json(w)}};
        return dump_json(document("bundle", j));
    };
    const auto a = run(), b = run();
    EXPECT_EQ(a, b);
    EXPECT_NE(a.find("\"verdict\": \"unstable\""), std::string::npos);
}

TEST(Io, CsvHasHeaderAndRejectsRaggedColumns)
{
    std::ostringstream os;
    write_csv(os, {"a", "b"}, {{1.0, 2.0}, {3.0, 4.0}});
    EXPECT_EQ(os.str(), "a,b\n1,3\n2,4\n");
    std::ostringstream bad;
    EXPECT_THROW(write_csv(bad, {"a", "b"}, {{1.0}, {3.0, 4.0}}), PreconditionError);
    EXPECT_THROW((void)open_output("/nonexistent-dir/x.json"), PreconditionError);
}

TEST(Io, ProfileCsv)
{
    const PotentialSpec s{Family::phi2n2, 3};
    const auto p = construct_profile(solve_beta(s, 0.0, 9.0), s, 64);
    std::ostringstream os;
    write_profile_csv(os, p);
    const auto text = os.str();
    EXPECT_EQ(text.rfind("x,phi,dphi\n", 0), 0u);
    std::size_t lines = 0;
    for (char ch : text) lines += ch == '\n';
    EXPECT_EQ(lines, 65u);
}
