#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mmc/dataset.hpp"
#include "mmc/engine.hpp"
#include "mmc/errors.hpp"
#include "mmc/geometry.hpp"

namespace mmc {

using json = nlohmann::json;

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline double parse_double(const std::string& field) {
    if (field.empty()) throw ParseError("empty numeric field");
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + field.size()) {
        throw ParseError("malformed number: '" + field + "'");
    }
    return v;
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string checksum_hex(std::string_view bytes) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Dataset CSV: header "x0,...,x{d-1},label", label +1 = white, -1 = black,
// empty = unlabeled pool row. '.' decimal, LF newlines, rectangular.
// ---------------------------------------------------------------------------

inline std::string dataset_to_csv(const Dataset& data) {
    std::string out;
    for (std::size_t k = 0; k < data.dim; ++k) {
        out += "x" + std::to_string(k) + ",";
    }
    out += "label\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t k = 0; k < data.dim; ++k) {
            out += format_double(data.points[i][k]);
            out += ',';
        }
        if (data.labeled()) {
            out += (*data.labels)[i] == Label::White ? "+1" : "-1";
        }
        out += '\n';
    }
    return out;
}

namespace detail_io {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace detail_io

inline Dataset dataset_from_csv(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (const char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    if (lines.empty()) throw ParseError("dataset file is empty");

    const auto header = detail_io::split_csv_line(lines[0]);
    if (header.size() < 2 || header.back() != "label") {
        throw ParseError("dataset header must be x0,...,x{d-1},label");
    }
    const std::size_t dim = header.size() - 1;
    for (std::size_t k = 0; k < dim; ++k) {
        if (header[k] != "x" + std::to_string(k)) {
            throw ParseError("dataset header must be x0,...,x{d-1},label; column " +
                             std::to_string(k) + " is '" + header[k] + "'");
        }
    }

    std::vector<Vector> points;
    std::vector<Label> labels;
    std::size_t labeled_rows = 0;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (lines[r].empty() && r + 1 == lines.size()) break;  // trailing newline
        const auto fields = detail_io::split_csv_line(lines[r]);
        if (fields.size() != dim + 1) {
            throw ParseError("row " + std::to_string(r) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(dim + 1));
        }
        Vector p(dim);
        for (std::size_t k = 0; k < dim; ++k) p[k] = parse_double(fields[k]);
        const std::string& lab = fields[dim];
        if (lab == "+1") {
            labels.push_back(Label::White);
            ++labeled_rows;
        } else if (lab == "-1") {
            labels.push_back(Label::Black);
            ++labeled_rows;
        } else if (lab.empty()) {
            labels.push_back(Label::Black);  // placeholder, discarded below
        } else {
            throw ParseError("row " + std::to_string(r) + " label must be +1, -1 or empty, got '" +
                             lab + "'");
        }
        points.push_back(std::move(p));
    }
    if (points.empty()) throw ParseError("dataset has no rows");
    if (labeled_rows != 0 && labeled_rows != points.size()) {
        throw ParseError("dataset mixes labeled and unlabeled rows (" +
                         std::to_string(labeled_rows) + " of " + std::to_string(points.size()) +
                         " labeled); labels are all-or-none");
    }
    if (labeled_rows == 0) {
        return make_dataset(std::move(points));
    }
    return make_dataset(std::move(points), std::move(labels));
}

// ---------------------------------------------------------------------------
// Slab / report JSON
// ---------------------------------------------------------------------------

inline json slab_to_json(const Slab& slab, double epsilon) {
    return json{{"anchor_b", slab.anchor_b}, {"anchor_w", slab.anchor_w}, {"epsilon", epsilon}};
}

/// Accepts either a bare slab object or a run report (uses its final_slab).
inline Slab slab_from_json(const json& j) {
    const json& src = j.contains("final_slab") ? j.at("final_slab") : j;
    if (!src.contains("anchor_b") || !src.contains("anchor_w")) {
        throw ParseError("slab JSON needs anchor_b and anchor_w arrays");
    }
    Slab s;
    s.anchor_b = src.at("anchor_b").get<Vector>();
    s.anchor_w = src.at("anchor_w").get<Vector>();
    if (s.anchor_b.size() != s.anchor_w.size() || s.anchor_b.empty()) {
        throw ParseError("slab anchors must be non-empty vectors of equal dimension");
    }
    return s;
}

inline json step_record_to_json(const StepRecord& rec) {
    json j{{"iteration", rec.iteration},
           {"case", to_string(rec.kind)},
           {"ell_before", rec.ell_before},
           {"ell_after", rec.ell_after}};
    j["index"] = rec.chosen_index ? json(*rec.chosen_index) : json(nullptr);
    j["label"] = rec.label ? json(to_string(*rec.label)) : json(nullptr);
    if (rec.geometry) {
        j["geometry"] = json{{"foot", rec.geometry->foot},
                             {"t_unclamped", rec.geometry->t_unclamped},
                             {"t_clamped", rec.geometry->t_clamped},
                             {"cos_alpha", rec.geometry->cos_alpha}};
    } else {
        j["geometry"] = nullptr;
    }
    return j;
}

inline StepRecord step_record_from_json(const json& j) {
    StepRecord rec;
    rec.iteration = j.at("iteration").get<std::int64_t>();
    const std::string kind = j.at("case").get<std::string>();
    if (kind == "slab_point") {
        rec.kind = StepCase::SlabPoint;
    } else if (kind == "counterexample") {
        rec.kind = StepCase::Counterexample;
    } else if (kind == "terminal") {
        rec.kind = StepCase::Terminal;
    } else {
        throw ParseError("unknown step case '" + kind + "'");
    }
    rec.ell_before = j.at("ell_before").get<double>();
    rec.ell_after = j.at("ell_after").get<double>();
    if (!j.at("index").is_null()) rec.chosen_index = j.at("index").get<std::size_t>();
    if (!j.at("label").is_null()) {
        rec.label = j.at("label").get<std::string>() == "white" ? Label::White : Label::Black;
    }
    if (!j.at("geometry").is_null()) {
        const json& g = j.at("geometry");
        StepGeometry geom;
        geom.foot = g.at("foot").get<Vector>();
        geom.t_unclamped = g.at("t_unclamped").get<double>();
        geom.t_clamped = g.at("t_clamped").get<double>();
        geom.cos_alpha = g.at("cos_alpha").get<double>();
        rec.geometry = std::move(geom);
    }
    return rec;
}

/// Run-level metadata stored next to the report in a report file.
struct RunMeta {
    std::string version;
    std::string dataset_checksum;
    double wall_seconds = 0.0;
    std::string mode = "offline";   // offline | active
    std::string oracle = "exact";   // exact | sampled
    std::int64_t sample_m = 0;
    std::uint64_t rng_seed = 0;
    double tol = 1e-12;
    double cap_constant = 256.0;
    std::optional<std::int64_t> explicit_cap;
};

inline json report_to_json(const TrainReport& rep, const RunMeta& meta) {
    json j;
    j["version"] = meta.version;
    j["dataset_checksum"] = meta.dataset_checksum;
    j["wall_seconds"] = meta.wall_seconds;
    j["config"] = json{{"epsilon", rep.epsilon},
                       {"mode", meta.mode},
                       {"oracle", meta.oracle},
                       {"sample_m", meta.sample_m},
                       {"rng_seed", meta.rng_seed},
                       {"tol", meta.tol},
                       {"cap_constant", meta.cap_constant},
                       {"explicit_cap",
                        meta.explicit_cap ? json(*meta.explicit_cap) : json(nullptr)}};
    j["converged"] = rep.converged;
    j["final_slab"] = slab_to_json(rep.final_slab, rep.epsilon);
    j["final_ell"] = rep.final_ell;
    j["width"] = rep.width;
    j["iterations"] = rep.iterations;
    j["case_a_count"] = rep.case_a_count;
    j["case_b_count"] = rep.case_b_count;
    j["labeling_calls"] = rep.labeling_calls;
    j["counterexample_calls"] = rep.counterexample_calls;
    j["epsilon"] = rep.epsilon;
    j["iteration_cap"] = rep.iteration_cap;
    j["warnings"] = rep.warnings;
    j["cert_min_weight"] = rep.cert_min_weight;
    j["cert_max_sum_error"] = rep.cert_max_sum_error;
    j["cert_max_reconstruction_error"] = rep.cert_max_reconstruction_error;
    json trace = json::array();
    for (const StepRecord& rec : rep.trace) trace.push_back(step_record_to_json(rec));
    j["trace"] = std::move(trace);
    return j;
}

inline std::pair<TrainReport, RunMeta> report_from_json(const json& j) {
    TrainReport rep;
    RunMeta meta;
    meta.version = j.at("version").get<std::string>();
    meta.dataset_checksum = j.at("dataset_checksum").get<std::string>();
    meta.wall_seconds = j.at("wall_seconds").get<double>();
    const json& cfg = j.at("config");
    meta.mode = cfg.at("mode").get<std::string>();
    meta.oracle = cfg.at("oracle").get<std::string>();
    meta.sample_m = cfg.at("sample_m").get<std::int64_t>();
    meta.rng_seed = cfg.at("rng_seed").get<std::uint64_t>();
    meta.tol = cfg.at("tol").get<double>();
    meta.cap_constant = cfg.at("cap_constant").get<double>();
    if (!cfg.at("explicit_cap").is_null()) {
        meta.explicit_cap = cfg.at("explicit_cap").get<std::int64_t>();
    }
    rep.converged = j.at("converged").get<bool>();
    rep.final_slab = slab_from_json(j.at("final_slab"));
    rep.final_ell = j.at("final_ell").get<double>();
    rep.width = j.at("width").get<double>();
    rep.iterations = j.at("iterations").get<std::int64_t>();
    rep.case_a_count = j.at("case_a_count").get<std::int64_t>();
    rep.case_b_count = j.at("case_b_count").get<std::int64_t>();
    rep.labeling_calls = j.at("labeling_calls").get<std::int64_t>();
    rep.counterexample_calls = j.at("counterexample_calls").get<std::int64_t>();
    rep.epsilon = j.at("epsilon").get<double>();
    rep.iteration_cap = j.at("iteration_cap").get<std::int64_t>();
    rep.warnings = j.at("warnings").get<std::vector<std::string>>();
    rep.cert_min_weight = j.at("cert_min_weight").get<double>();
    rep.cert_max_sum_error = j.at("cert_max_sum_error").get<double>();
    rep.cert_max_reconstruction_error = j.at("cert_max_reconstruction_error").get<double>();
    for (const json& rj : j.at("trace")) rep.trace.push_back(step_record_from_json(rj));
    return {std::move(rep), std::move(meta)};
}

/// Per-iteration trace CSV: iteration, case, index, ell, cos_alpha,
/// t_unclamped. Terminal rows leave the point-specific columns empty.
inline std::string trace_to_csv(const TrainReport& rep) {
    std::string out = "iteration,case,index,ell,cos_alpha,t_unclamped\n";
    for (const StepRecord& rec : rep.trace) {
        out += std::to_string(rec.iteration);
        out += ',';
        out += to_string(rec.kind);
        out += ',';
        if (rec.chosen_index) out += std::to_string(*rec.chosen_index);
        out += ',';
        out += format_double(rec.ell_after);
        out += ',';
        if (rec.geometry) out += format_double(rec.geometry->cos_alpha);
        out += ',';
        if (rec.geometry) out += format_double(rec.geometry->t_unclamped);
        out += '\n';
    }
    return out;
}

}  // namespace mmc
