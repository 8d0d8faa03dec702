#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "tracerecon/engine.hpp"

namespace trace_recon {

/// One timeline line. Unresolved shared clusters appear with every candidate
/// joined by `|` in `action` and the shared-ambiguous note.
struct ReportRow {
    std::string computer_label;
    std::string action;
    InstanceRank rank{InstanceRank::Past};
    Timestamp detected;
    Timestamp interval_start;
    Timestamp interval_end;
    std::size_t evidence_count{0};
    std::string note;
};

enum class TimeDisplay { Epoch, Iso8601 };

enum class ReportFormat { Table, Csv, Records };

/// Instances newest first, then unresolved shared clusters newest first.
std::vector<ReportRow> build_report_rows(const std::string& computer_label, const Reconstruction& reconstruction);

void render_table(std::ostream& out, const std::vector<ReportRow>& rows, TimeDisplay display);
void render_csv(std::ostream& out, const std::vector<ReportRow>& rows, TimeDisplay display);
/// JSON Lines, one object per row.
void render_records(std::ostream& out, const std::vector<ReportRow>& rows, TimeDisplay display);

void render_report(std::ostream& out, const std::vector<ReportRow>& rows, ReportFormat format, TimeDisplay display);

}  // namespace trace_recon
