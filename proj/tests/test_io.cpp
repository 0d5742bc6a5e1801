#include "covshift/csv.hpp"
#include "covshift/svg.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

using namespace covshift;

TEST_CASE("numbers round-trip through their text form") {
    for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, std::numeric_limits<double>::max()}) {
        CHECK(std::strtod(csv::number(v).c_str(), nullptr) == v);
    }
    CHECK(csv::number(0.1) == "0.1");
    CHECK(csv::number(std::nan("")).empty());
}

TEST_CASE("escaping") {
    CHECK(csv::escape("plain") == "plain");
    CHECK(csv::escape("a,b") == "\"a,b\"");
    CHECK(csv::escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv::escape("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("writer and reader agree") {
    std::ostringstream o;
    csv::Writer w(o);
    w.row({"name", "value"});
    w.row({"a,b", "1"});
    w.row({"quote \"q\"", "2"});
    w.row({"multi\nline", ""});
    std::istringstream in(o.str());
    const csv::Table t = csv::read(in);
    REQUIRE(t.header == std::vector<std::string>{"name", "value"});
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0][0] == "a,b");
    CHECK(t.rows[1][0] == "quote \"q\"");
    CHECK(t.rows[2][0] == "multi\nline");
    CHECK(t.rows[2][1].empty());
    CHECK(t.column("value") == 1);
    CHECK(t.column("missing") == -1);
}

TEST_CASE("malformed documents") {
    std::istringstream empty("");
    CHECK_THROWS(csv::read(empty));
    std::istringstream ragged("x,y\n1,2\n3\n");
    CHECK_THROWS(csv::read(ragged));
    std::istringstream open_quote("x,y\n\"1,2\n");
    CHECK_THROWS(csv::read(open_quote));
    CHECK_THROWS(csv::read_file("/nonexistent/file.csv"));
}

TEST_CASE("svg rendering") {
    svg::Plot p;
    p.title = "errors";
    p.log_x = true;
    p.log_y = true;
    p.series.push_back({"median", {100, 200, 400}, {0.3, 0.2, 0.1}, "#1f77b4", false, true});
    p.series.push_back({"guide", {100, 200, 400}, {0.3, 0.0, -1.0}, "#7f7f7f", true, false});
    const std::string s = svg::render(p);
    CHECK(s.rfind("<svg", 0) == 0);
    CHECK(s.find("</svg>") != std::string::npos);
    CHECK(s.find("errors") != std::string::npos);
    CHECK(s.find("median") != std::string::npos);
    CHECK(s.find("nan") == std::string::npos);
    CHECK(s.find("inf") == std::string::npos);
    CHECK(svg::render(p) == s);
}
