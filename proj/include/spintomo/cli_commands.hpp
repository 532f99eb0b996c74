#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spintomo/circuits.hpp"
#include "spintomo/experiments.hpp"
#include "spintomo/tomogram_io.hpp"

namespace spintomo {

inline constexpr const char* kVersion = "0.1.0";

// Configuration problems map to exit code 2; CrossCheckError maps to 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string case_label;                       // I, II-i, II-ii, II-iii, III-A..III-D
    std::optional<double> t_max;                  // seconds (II/III) or chi t (I)
    std::optional<int> grid_points;
    std::optional<std::vector<double>> times;     // explicit grid, overrides t_max/points
    std::uint64_t seed = kDefaultSamplingSeed;
    std::optional<std::vector<std::string>> slice_subset;  // xi'_TEI subset
    std::string discord_model = "full";           // full | product
    std::optional<int> discord_restarts;
    std::optional<double> epsilon;
    std::vector<double> snapshot_times;
    std::string pcc_side_value = "sum";           // sum | max

    // circuit subcommand
    double theta = std::numbers::pi / 2.0;
    std::string variant = "equivalent";           // equivalent | theta_zero | compact
    std::uint64_t n_shots = 8192;
    int repetitions = 6;
    bool exact = false;

    std::string out_dir = ".";
};

inline RunConfig parse_config_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: malformed JSON in " + path + ": " + e.what());
    }
    RunConfig cfg;
    try {
        static const std::vector<std::string> known{
            "case",     "t_max",          "grid_points",      "times",   "seed",  "slice_subset",
            "discord",  "epsilon",        "snapshot_times",   "theta",   "shots", "repetitions",
            "variant",  "exact",          "out_dir",          "pcc_side_value"};
        for (const auto& [key, value] : j.items()) {
            (void)value;
            bool ok = false;
            for (const auto& k : known) ok = ok || k == key;
            if (!ok) throw ConfigError("config: unknown key '" + key + "'");
        }
        if (j.contains("case")) cfg.case_label = j["case"].get<std::string>();
        if (j.contains("t_max")) cfg.t_max = j["t_max"].get<double>();
        if (j.contains("grid_points")) cfg.grid_points = j["grid_points"].get<int>();
        if (j.contains("times")) cfg.times = j["times"].get<std::vector<double>>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("slice_subset")) cfg.slice_subset = j["slice_subset"].get<std::vector<std::string>>();
        if (j.contains("discord")) {
            const auto& d = j["discord"];
            if (d.contains("model")) cfg.discord_model = d["model"].get<std::string>();
            if (d.contains("restarts")) cfg.discord_restarts = d["restarts"].get<int>();
        }
        if (j.contains("epsilon")) cfg.epsilon = j["epsilon"].get<double>();
        if (j.contains("snapshot_times")) cfg.snapshot_times = j["snapshot_times"].get<std::vector<double>>();
        if (j.contains("theta")) cfg.theta = j["theta"].get<double>();
        if (j.contains("shots")) cfg.n_shots = j["shots"].get<std::uint64_t>();
        if (j.contains("repetitions")) cfg.repetitions = j["repetitions"].get<int>();
        if (j.contains("variant")) cfg.variant = j["variant"].get<std::string>();
        if (j.contains("exact")) cfg.exact = j["exact"].get<bool>();
        if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
        if (j.contains("pcc_side_value")) cfg.pcc_side_value = j["pcc_side_value"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: bad field type: ") + e.what());
    }
    if (cfg.discord_model != "full" && cfg.discord_model != "product") {
        throw ConfigError("config: discord.model must be 'full' or 'product'");
    }
    if (cfg.pcc_side_value != "sum" && cfg.pcc_side_value != "max") {
        throw ConfigError("config: pcc_side_value must be 'sum' or 'max'");
    }
    return cfg;
}

namespace detail {

inline std::string csv_cell(const std::optional<double>& v) { return v ? format_g12(*v) : std::string(); }

inline nlohmann::json averages_json(const IndicatorAverages& a) {
    return {{"xi_tei", a.xi_tei}, {"xi_ipr", a.xi_ipr}, {"xi_pcc", a.xi_pcc}, {"xi_bd", a.xi_bd}};
}

inline void apply_discord_config(const RunConfig& cfg, DiscordOptions& opt) {
    opt.model = cfg.discord_model == "product" ? MeasurementModel::LocalProduct : MeasurementModel::FullVonNeumann;
    if (cfg.discord_restarts) opt.restarts = *cfg.discord_restarts;
    opt.seed = cfg.seed;
}

inline void write_manifest(const std::filesystem::path& dir, const std::string& command, const nlohmann::json& echo) {
    nlohmann::json j;
    j["tool"] = "spintomo";
    j["version"] = kVersion;
    j["command"] = command;
    j["config"] = echo;
    std::ofstream out(dir / "run_manifest.json");
    out << j.dump(1) << "\n";
}

}  // namespace detail

// Run an experiment preset and write timeseries.csv, requested tomogram
// snapshots, and the reproducibility manifest. Returns the run.
inline ExperimentRun cmd_experiment(const RunConfig& cfg) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);

    ExperimentRun run;
    nlohmann::json echo;
    echo["case"] = cfg.case_label;
    echo["seed"] = cfg.seed;
    echo["discord_model"] = cfg.discord_model;
    echo["pcc_side_value"] = cfg.pcc_side_value;

    if (cfg.case_label == "I") {
        ExperimentIConfig icfg = preset_experiment_I();
        icfg.seed = cfg.seed;
        detail::apply_discord_config(cfg, icfg.discord);
        if (cfg.times) {
            icfg.chi_t_grid = *cfg.times;
        } else if (cfg.t_max || cfg.grid_points) {
            icfg.chi_t_grid = linspace(0.0, cfg.t_max.value_or(std::numbers::pi / 2.0), cfg.grid_points.value_or(65));
        }
        if (cfg.slice_subset) icfg.reduced_subset = *cfg.slice_subset;
        echo["chi_t_grid"] = icfg.chi_t_grid;
        echo["reduced_subset"] = icfg.reduced_subset;
        echo["discord_restarts"] = icfg.discord.restarts;
        run = run_experiment_I(icfg);
    } else {
        ExperimentNConfig ncfg;
        try {
            ncfg = preset_experiment_N(cfg.case_label);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        ncfg.seed = cfg.seed;
        detail::apply_discord_config(cfg, ncfg.discord);
        if (cfg.times) {
            ncfg.t_grid = *cfg.times;
        } else if (cfg.t_max || cfg.grid_points) {
            ncfg.t_grid = linspace(0.0, cfg.t_max.value_or(0.010), cfg.grid_points.value_or(101));
        }
        if (cfg.epsilon) ncfg.epsilon = *cfg.epsilon;
        if (cfg.slice_subset) ncfg.reduced_subset = *cfg.slice_subset;
        if (cfg.pcc_side_value == "max") ncfg.pcc_mode = PccSideValue::PerQubitMax;
        echo["t_grid"] = ncfg.t_grid;
        echo["epsilon"] = ncfg.epsilon;
        echo["reduced_subset"] = ncfg.reduced_subset;
        echo["discord_restarts"] = ncfg.discord.restarts;
        run = run_experiment_N(ncfg);
    }

    std::ofstream csv(dir / "timeseries.csv");
    csv << "t,xi_tei,xi_tei_reduced,xi_ipr,xi_pcc,xi_bd,xi_qmi,discord,negativity,extent1,extent2\n";
    for (const auto& rec : run.records) {
        csv << format_g12(rec.t) << ',' << format_g12(rec.indicators.averages.xi_tei) << ','
            << (rec.indicators.reduced ? format_g12(rec.indicators.reduced->averages.xi_tei) : std::string()) << ','
            << format_g12(rec.indicators.averages.xi_ipr) << ',' << format_g12(rec.indicators.averages.xi_pcc) << ','
            << format_g12(rec.indicators.averages.xi_bd) << ',' << format_g12(rec.qmi) << ','
            << (rec.discord ? format_g12(rec.discord->value) : std::string()) << ','
            << detail::csv_cell(rec.negativity) << ',' << format_g12(rec.squeezing.extent_1) << ','
            << detail::csv_cell(rec.squeezing.extent_2) << "\n";
    }
    csv.close();

    for (double want : cfg.snapshot_times) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < run.records.size(); ++i) {
            if (std::abs(run.records[i].t - want) < std::abs(run.records[best].t - want)) best = i;
        }
        const std::string stem = "tomogram_t" + format_g12(run.records[best].t);
        write_tomogram(run.records[best].tomogram, (dir / (stem + ".json")).string());
        write_tomogram_csv(run.records[best].tomogram, (dir / (stem + ".csv")).string());
    }

    echo["snapshot_times"] = cfg.snapshot_times;
    detail::write_manifest(dir, "experiment", echo);
    return run;
}

inline Bipartition parse_bipartition(const std::string& spec, int n_qubits) {
    if (spec.empty()) {
        Bipartition bp;
        bp.side_a = {0};
        for (int q = 1; q < n_qubits; ++q) bp.side_b.push_back(q);
        if (bp.side_b.empty()) throw ConfigError("bipartition: need at least two qubits");
        return bp;
    }
    Bipartition bp;
    std::vector<int>* side = &bp.side_a;
    for (char c : spec) {
        if (c == '|') {
            if (side == &bp.side_b) throw ConfigError("bipartition: expected exactly one '|'");
            side = &bp.side_b;
        } else if (c >= '0' && c <= '9') {
            side->push_back(c - '0');
        } else if (c != ',' && c != ' ') {
            throw ConfigError(std::string("bipartition: unexpected character '") + c + "'");
        }
    }
    try {
        bp.validate(n_qubits);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return bp;
}

// Analyze an external tomogram file: indicator report over the present
// slices, squeezing when the full quorum is available.
inline nlohmann::json cmd_analyze_tomogram(const std::string& path, const std::string& bipartition_spec,
                                           const RunConfig& cfg) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    const Tomogram tom = read_tomogram(path);
    const Bipartition bp = parse_bipartition(bipartition_spec, tom.n_qubits);
    const PccSideValue mode = cfg.pcc_side_value == "max" ? PccSideValue::PerQubitMax : PccSideValue::CollectiveSum;

    nlohmann::json j;
    j["source"] = path;
    j["n_qubits"] = tom.n_qubits;
    j["bipartition"] = {{"side_a", bp.side_a}, {"side_b", bp.side_b}};

    const IndicatorReport rep = average_indicators(tom, bp, std::nullopt, mode);
    nlohmann::json slices = nlohmann::json::array();
    std::vector<std::string> used;
    for (const auto& s : rep.slices) {
        used.push_back(s.axes);
        slices.push_back({{"axes", s.axes},
                          {"eps_tei", s.eps_tei},
                          {"eps_ipr", s.eps_ipr},
                          {"eps_pcc", s.eps_pcc},
                          {"eps_bd", s.eps_bd},
                          {"pcc_degenerate", s.pcc_degenerate}});
    }
    j["slices"] = std::move(slices);
    j["slices_used"] = used;
    std::vector<std::string> missing;
    for (const auto& key : all_axis_keys(tom.n_qubits)) {
        if (!tom.has_slice(key)) missing.push_back(key);
    }
    j["slices_missing"] = missing;

    if (tom.is_full()) {
        j["averages"] = detail::averages_json(rep.averages);
    } else {
        j["averages"] = nullptr;
        j["averages_note"] = "partial tomogram: full-quorum averages unavailable";
        j["partial_averages"] = detail::averages_json(rep.averages);
    }

    const auto reduced_subset = cfg.slice_subset.value_or(default_reduced_subset(tom.n_qubits));
    bool have_reduced = !reduced_subset.empty();
    for (const auto& k : reduced_subset) have_reduced = have_reduced && tom.has_slice(k);
    if (have_reduced) {
        const auto red = average_indicators(tom, bp, reduced_subset, mode);
        j["reduced"] = {{"subset", reduced_subset}, {"xi_tei", red.averages.xi_tei}};
    }

    if (tom.is_full()) {
        SqueezingParams sp;
        sp.seed = cfg.seed;
        const SqueezingReport sq = squeezing_from_tomogram(tom, sp);
        nlohmann::json s;
        s["var_min_1"] = sq.first.var_min;
        s["var_min_1_exact"] = sq.first.var_min_exact;
        s["extent_1"] = sq.extent_1;
        if (sq.second) {
            s["var_min_2"] = sq.second->var_min;
            s["extent_2"] = *sq.extent_2;
        }
        if (sq.mean_spin) {
            s["mean_spin_direction"] = {(*sq.mean_spin)[0], (*sq.mean_spin)[1], (*sq.mean_spin)[2]};
        } else {
            s["mean_spin_direction"] = nullptr;
        }
        nlohmann::json ent = nlohmann::json::array();
        for (int q = 0; q < tom.n_qubits; ++q) {
            const auto e = entropic_squeezing_check(tom, q);
            ent.push_back({{"qubit", q},
                           {"entropy_x", e.entropy_xyz[0]},
                           {"entropy_y", e.entropy_xyz[1]},
                           {"entropy_z", e.entropy_xyz[2]},
                           {"flagged", e.any_flagged}});
        }
        s["entropic_squeezing"] = std::move(ent);
        j["squeezing"] = std::move(s);
    } else {
        j["squeezing"] = nullptr;
        j["squeezing_note"] = "requires all " + std::to_string(Tomogram::pow3(tom.n_qubits)) + " slices";
    }

    std::ofstream out(dir / "analysis.json");
    out << j.dump(1) << "\n";
    detail::write_manifest(dir, "analyze-tomogram", {{"path", path}, {"bipartition", bipartition_spec}});
    return j;
}

// Build / sample / estimate pipeline for the equivalent circuits.
inline nlohmann::json cmd_circuit(const RunConfig& cfg) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);

    Circuit circuit(4);
    if (cfg.variant == "equivalent") {
        try {
            circuit = build_equivalent_circuit(cfg.theta);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else if (cfg.variant == "theta_zero") {
        circuit = build_initial_state_circuit(InitialStateVariant::ThetaZero);
    } else if (cfg.variant == "compact") {
        circuit = build_initial_state_circuit(InitialStateVariant::Compact);
    } else {
        throw ConfigError("circuit: unknown variant '" + cfg.variant + "' (equivalent, theta_zero, compact)");
    }

    {
        std::ofstream out(dir / "circuit.txt");
        out << circuit_to_text(circuit);
    }

    nlohmann::json j;
    j["variant"] = cfg.variant;
    if (cfg.variant == "equivalent") j["theta"] = cfg.theta;

    if (cfg.exact) {
        const Tomogram tom = exact_measurement_tomogram(circuit);
        write_tomogram(tom, (dir / "tomogram_exact.json").string());
        write_tomogram_csv(tom, (dir / "tomogram_exact.csv").string());
        const double xi = average_indicators(tom, {{0}, {1}}).averages.xi_tei;
        j["mode"] = "exact";
        j["xi_tei"] = xi;
    } else {
        const ShotTomographyResult res = tomogram_from_shots(circuit, cfg.n_shots, cfg.repetitions, cfg.seed);
        for (int r = 0; r < res.repetitions; ++r) {
            const std::string stem = "tomogram_rep" + std::to_string(r);
            write_tomogram(res.tomograms[r], (dir / (stem + ".json")).string());
            write_tomogram_csv(res.tomograms[r], (dir / (stem + ".csv")).string());
        }
        j["mode"] = "shots";
        j["n_shots"] = res.n_shots;
        j["repetitions"] = res.repetitions;
        j["seed"] = res.seed;
        j["xi_tei_per_repetition"] = res.xi_tei;
        j["xi_tei_mean"] = res.xi_tei_mean;
        j["xi_tei_std"] = res.xi_tei_std;
    }

    std::ofstream out(dir / "circuit_summary.json");
    out << j.dump(1) << "\n";
    nlohmann::json echo;
    echo["variant"] = cfg.variant;
    echo["theta"] = cfg.theta;
    echo["shots"] = cfg.n_shots;
    echo["repetitions"] = cfg.repetitions;
    echo["seed"] = cfg.seed;
    echo["exact"] = cfg.exact;
    detail::write_manifest(dir, "circuit", echo);
    return j;
}

inline void cmd_list_presets(std::ostream& os) {
    os << "available experiment presets:\n";
    os << "  I       mediated two-probe register, scaled time grid [0, pi/2], 65 points\n";
    for (const auto& name : preset_names()) {
        if (name == "I") continue;
        const auto cfg = preset_experiment_N(name);
        os << "  " << name << std::string(8 - name.size(), ' ');
        os << cfg.n_qubits << " qubits, omega/2pi = [";
        for (std::size_t i = 0; i < cfg.omega.size(); ++i) {
            os << (i ? ", " : "") << format_g12(cfg.omega[i] / (2.0 * std::numbers::pi));
        }
        os << "] Hz, bipartition ";
        for (std::size_t i = 0; i < cfg.bipartition.side_a.size(); ++i) os << cfg.bipartition.side_a[i] + 1;
        os << "|";
        for (std::size_t i = 0; i < cfg.bipartition.side_b.size(); ++i) os << cfg.bipartition.side_b[i] + 1;
        os << ", epsilon = " << format_g12(cfg.epsilon) << "\n";
    }
}

}  // namespace spintomo
