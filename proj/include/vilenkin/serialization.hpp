#pragma once

#include "vilenkin/harness.hpp"
#include "vilenkin/system.hpp"
#include "vilenkin/transform.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

// JSON wire formats: value files for the CLI transform path, trial configs,
// trial reports, and self-contained digests of worst-case instances.  Keys
// are emitted in nlohmann's sorted order and doubles round-trip exactly, so
// identical data serializes to identical bytes.

namespace vilenkin {

using nlohmann::json;

inline json values_to_json(const std::vector<cplx>& values) {
    json out = json::array();
    for (const cplx& v : values) out.push_back(json::array({v.real(), v.imag()}));
    return out;
}

inline std::vector<cplx> values_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("values: expected an array of [re, im] pairs");
    std::vector<cplx> out;
    out.reserve(j.size());
    for (const json& pair : j) {
        if (!pair.is_array() || pair.size() != 2)
            throw std::invalid_argument("values: each entry must be a [re, im] pair");
        out.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    return out;
}

// Signal and spectrum files share one layout; "kind" tells them apart.
struct ValueFile {
    std::vector<int> radices;
    std::string kind;  // "signal" or "spectrum"
    std::vector<cplx> values;
};

inline json value_file_to_json(const ValueFile& file) {
    return json{{"p", file.radices},
                {"K", file.radices.size()},
                {"kind", file.kind},
                {"values", values_to_json(file.values)}};
}

inline ValueFile value_file_from_json(const json& j) {
    if (!j.is_object() || !j.contains("p") || !j.contains("values"))
        throw std::invalid_argument("value file: need an object with \"p\" and \"values\"");
    ValueFile file;
    file.radices = j.at("p").get<std::vector<int>>();
    if (j.contains("K") &&
        j.at("K").get<std::size_t>() != file.radices.size())
        throw std::invalid_argument("value file: K does not match the length of p");
    file.kind = j.value("kind", "signal");
    if (file.kind != "signal" && file.kind != "spectrum")
        throw std::invalid_argument("value file: kind must be \"signal\" or \"spectrum\"");
    file.values = values_from_json(j.at("values"));
    return file;
}

inline std::string target_name(RatioTarget target) {
    switch (target) {
        case RatioTarget::rdf:
            return "rdf";
        case RatioTarget::hardy:
            return "hardy";
        default:
            return "square-function";
    }
}

inline RatioTarget target_from_name(const std::string& name) {
    if (name == "rdf") return RatioTarget::rdf;
    if (name == "hardy") return RatioTarget::hardy;
    if (name == "square-function") return RatioTarget::square_function;
    throw std::invalid_argument("target: expected rdf, hardy, or square-function, got \"" + name +
                                "\"");
}

inline std::string law_name(CoefficientKind kind) {
    return kind == CoefficientKind::gaussian ? "gaussian" : "unimodular";
}

inline CoefficientKind law_from_name(const std::string& name) {
    if (name == "gaussian") return CoefficientKind::gaussian;
    if (name == "unimodular") return CoefficientKind::unimodular;
    throw std::invalid_argument("law: expected gaussian or unimodular, got \"" + name + "\"");
}

inline json config_to_json(const TrialConfig& cfg) {
    return json{{"radices", cfg.radices},
                {"exponents", cfg.exponents},
                {"min_intervals", cfg.min_intervals},
                {"max_intervals", cfg.max_intervals},
                {"law", law_name(cfg.law.kind)},
                {"scale", cfg.law.scale},
                {"trials", cfg.trials},
                {"seed", cfg.seed},
                {"adversarial", cfg.adversarial},
                {"adversarial_iterations", cfg.adversarial_iterations},
                {"restarts", cfg.restarts},
                {"target", target_name(cfg.target)}};
}

// Strict parse: unknown keys are configuration errors, missing keys fall
// back to defaults (radices excepted).
inline TrialConfig config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
    TrialConfig cfg;
    bool saw_radices = false;
    for (const auto& [key, value] : j.items()) {
        if (key == "radices") {
            cfg.radices = value.get<std::vector<int>>();
            saw_radices = true;
        } else if (key == "exponents") {
            cfg.exponents = value.get<std::vector<double>>();
        } else if (key == "min_intervals") {
            cfg.min_intervals = value.get<std::int64_t>();
        } else if (key == "max_intervals") {
            cfg.max_intervals = value.get<std::int64_t>();
        } else if (key == "law") {
            cfg.law.kind = law_from_name(value.get<std::string>());
        } else if (key == "scale") {
            cfg.law.scale = value.get<double>();
        } else if (key == "trials") {
            cfg.trials = value.get<std::int64_t>();
        } else if (key == "seed") {
            cfg.seed = value.get<std::uint64_t>();
        } else if (key == "adversarial") {
            cfg.adversarial = value.get<bool>();
        } else if (key == "adversarial_iterations") {
            cfg.adversarial_iterations = value.get<std::int64_t>();
        } else if (key == "restarts") {
            cfg.restarts = value.get<int>();
        } else if (key == "target") {
            cfg.target = target_from_name(value.get<std::string>());
        } else {
            throw std::invalid_argument("config: unknown key \"" + key + "\"");
        }
    }
    if (!saw_radices) throw std::invalid_argument("config: \"radices\" is required");
    return cfg;
}

inline json stats_to_json(const RatioStats& stats) {
    return json{{"max", stats.max}, {"min", stats.min},   {"mean", stats.mean},
                {"q50", stats.q50}, {"q90", stats.q90},   {"q99", stats.q99}};
}

// Self-contained digest: everything needed to rebuild the family and
// recompute the ratio.
inline json worst_to_json(const WorstCase& worst, const std::vector<int>& radices,
                          double exponent, RatioTarget target) {
    json intervals = json::array();
    for (const IntervalZ& seg : worst.intervals)
        intervals.push_back(json::array({seg.a, seg.b}));
    json coefficients = json::array();
    for (const auto& member : worst.coefficients) coefficients.push_back(values_to_json(member));
    return json{{"ratio", worst.ratio},   {"radices", radices},
                {"exponent", exponent},   {"target", target_name(target)},
                {"intervals", intervals}, {"coefficients", coefficients}};
}

inline json report_to_json(const TrialReport& report) {
    json rows = json::array();
    for (const ExponentRow& row : report.rows) {
        json r = stats_to_json(row.stats);
        r["exponent"] = row.exponent;
        r["refined_max"] = row.refined_max;
        if (row.has_martingale) {
            r["martingale"] = stats_to_json(row.martingale_stats);
            r["violations"] = row.pointwise_violations;
        }
        r["worst"] =
            worst_to_json(row.worst, report.config.radices, row.exponent, report.config.target);
        rows.push_back(std::move(r));
    }
    return json{{"config", config_to_json(report.config)},
                {"rows", rows},
                {"runtime_ms", report.runtime_ms}};
}

inline std::string report_to_csv(const TrialReport& report) {
    std::string out = "exponent,max,min,mean,q50,q90,q99,refined_max,violations,seed\n";
    for (const ExponentRow& row : report.rows) {
        json line = json::array({row.exponent, row.stats.max, row.stats.min, row.stats.mean,
                                 row.stats.q50, row.stats.q90, row.stats.q99, row.refined_max});
        std::string flat = line.dump();
        flat = flat.substr(1, flat.size() - 2);  // strip the brackets
        out += flat;
        out += ',';
        if (row.has_martingale) out += std::to_string(row.pointwise_violations);
        out += ',';
        out += std::to_string(report.config.seed);
        out += '\n';
    }
    return out;
}

struct ReplayOutcome {
    double stored = 0.0;
    double recomputed = 0.0;
    bool exact_match() const { return stored == recomputed; }
};

// Rebuild the instance named by a digest and recompute its ratio.
inline ReplayOutcome replay_digest(const json& digest) {
    if (!digest.is_object() || !digest.contains("coefficients"))
        throw std::invalid_argument("replay: digest must carry coefficients");
    const SystemSpec spec(digest.at("radices").get<std::vector<int>>());
    const double p = digest.at("exponent").get<double>();
    const RatioTarget target = target_from_name(digest.at("target").get<std::string>());

    std::vector<IntervalZ> intervals;
    for (const json& pair : digest.at("intervals"))
        intervals.push_back(IntervalZ{pair[0].get<std::int64_t>(), pair[1].get<std::int64_t>()});
    SpectrumFamily fam;
    for (const json& member : digest.at("coefficients"))
        fam.members.push_back(Spectrum{values_from_json(member)});

    ReplayOutcome outcome;
    outcome.stored = digest.at("ratio").get<double>();
    outcome.recomputed = evaluate_ratio(fam, intervals, p, target, spec);
    return outcome;
}

}  // namespace vilenkin
