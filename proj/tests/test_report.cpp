#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "support.hpp"
#include "tracerecon/bodyfile.hpp"
#include "tracerecon/report.hpp"

using namespace trace_recon;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<ReportRow> layered_rows() {
    const auto pack = load_signature_pack(test_support::fixture("layered_example.sig"));
    const auto objects = load_metadata(test_support::fixture("layered_example.body"), MetadataFormat::Bodyfile);
    return build_report_rows("lab", reconstruct_detailed(objects, pack));
}

}  // namespace

TEST_CASE("rows list instances first, then unresolved shared clusters") {
    const auto rows = layered_rows();
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].action == "ActionY");
    CHECK(rows[1].action == "ActionX");
    CHECK(rows[1].rank == InstanceRank::MostRecent);
    CHECK(rows[2].action == "ActionX");
    CHECK(rows[3].action == "ActionX|ActionY");
    CHECK(rows[3].note == "shared-ambiguous");
    for (const auto& r : rows) CHECK(r.computer_label == "lab");
}

TEST_CASE("table, csv and records carry the same rows") {
    const auto rows = layered_rows();
    std::ostringstream table;
    std::ostringstream csv;
    std::ostringstream records;
    render_table(table, rows, TimeDisplay::Epoch);
    render_csv(csv, rows, TimeDisplay::Epoch);
    render_records(records, rows, TimeDisplay::Epoch);

    const auto table_lines = lines_of(table.str());
    const auto csv_lines = lines_of(csv.str());
    const auto record_lines = lines_of(records.str());
    REQUIRE(table_lines.size() == rows.size() + 2);
    REQUIRE(csv_lines.size() == rows.size() + 1);
    REQUIRE(record_lines.size() == rows.size());
    CHECK(csv_lines[0] == "computer,action,rank,detected,start,end,evidence,note");
    CHECK(table_lines.back() == "3 detections, 1 unresolved shared cluster");

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto j = nlohmann::json::parse(record_lines[i]);
        CHECK(j["action"] == rows[i].action);
        CHECK(j["detected"] == rows[i].detected.seconds);
        CHECK(j["start"] == rows[i].interval_start.seconds);
        CHECK(j["end"] == rows[i].interval_end.seconds);
        CHECK(j["evidence"] == rows[i].evidence_count);
        CHECK(j["rank"] == std::string(to_string(rows[i].rank)));

        const std::string detected = std::to_string(rows[i].detected.seconds);
        CHECK(csv_lines[i + 1].find("," + detected + ",") != std::string::npos);
        CHECK(table_lines[i + 1].find(detected) != std::string::npos);
        CHECK(table_lines[i + 1].find(rows[i].action) != std::string::npos);
    }
}

TEST_CASE("iso display") {
    const auto rows = layered_rows();
    std::ostringstream records;
    render_records(records, rows, TimeDisplay::Iso8601);
    const auto j = nlohmann::json::parse(lines_of(records.str())[1]);
    CHECK(j["detected"] == "2010-04-14T19:28:18Z");
    CHECK(j["start"] == "2010-04-14T19:27:48Z");
}

TEST_CASE("csv quotes awkward fields") {
    std::vector<ReportRow> rows{ReportRow{"pc, \"two\"", "A", InstanceRank::MostRecent, Timestamp{5}, Timestamp{0},
                                          Timestamp{5}, 1, "definite"}};
    std::ostringstream csv;
    render_csv(csv, rows, TimeDisplay::Epoch);
    CHECK(lines_of(csv.str())[1] == "\"pc, \"\"two\"\"\",A,most-recent,5,0,5,1,definite");
}

TEST_CASE("empty report") {
    std::ostringstream table;
    render_table(table, {}, TimeDisplay::Epoch);
    CHECK(table.str() == "0 detections\n");
    std::ostringstream records;
    render_records(records, {}, TimeDisplay::Epoch);
    CHECK(records.str().empty());
}
