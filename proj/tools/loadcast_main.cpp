// loadcast: univariate load-forecasting toolkit and benchmark harness.
//
// Subcommands: synth (generate a synthetic trace), prepare (dataset
// adjustment to the three sampling rates), run (experiment grid), report
// (tables and plot data from a results file).

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "loadcast/bench/experiment.hpp"
#include "loadcast/bench/report.hpp"
#include "loadcast/config.hpp"
#include "loadcast/io/csv.hpp"
#include "loadcast/pipeline.hpp"
#include "loadcast/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitExperimentFailures = 3;

std::vector<std::string> split_list(const std::string& text) {
	std::vector<std::string> items;
	std::string current;
	for (char c : text) {
		if (c == ',') {
			if (!current.empty()) items.push_back(current);
			current.clear();
		} else {
			current += c;
		}
	}
	if (!current.empty()) items.push_back(current);
	return items;
}

struct CommonFlags {
	std::string config_path;
	std::string out_dir;
	std::uint64_t seed = 0;
	bool seed_set = false;
	std::string methods;
	std::string rates;
	std::string datasets;
	int parallelism = 0;
	int max_trials = 0;
};

loadcast::RunConfig load_config(const CommonFlags& flags) {
	loadcast::RunConfig config;
	if (!flags.config_path.empty()) {
		config = loadcast::RunConfig::from_json(loadcast::io::read_json_file(flags.config_path));
	}
	if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
	if (flags.seed_set) {
		config.seed = flags.seed;
		config.adjustment.seed = flags.seed;
	}
	if (!flags.methods.empty()) config.methods = split_list(flags.methods);
	if (!flags.rates.empty()) config.rates = split_list(flags.rates);
	if (!flags.datasets.empty()) {
		const auto keep = split_list(flags.datasets);
		std::vector<loadcast::DatasetEntry> filtered;
		for (const auto& entry : config.datasets) {
			if (std::find(keep.begin(), keep.end(), entry.id) != keep.end()) {
				filtered.push_back(entry);
			}
		}
		config.datasets = std::move(filtered);
	}
	if (flags.parallelism > 0) config.budget.parallelism = flags.parallelism;
	if (flags.max_trials > 0) config.budget.max_trials = flags.max_trials;
	config.validate(true);
	return config;
}

fs::path prepared_csv_path(const loadcast::RunConfig& config, const std::string& dataset,
                           const loadcast::RateProfile& profile) {
	return fs::path(config.out_dir) / "prepared" / (dataset + "_" + profile.name() + ".csv");
}

int cmd_synth(const loadcast::SynthSpec& spec, const std::string& out_path) {
	const auto series = loadcast::generate_synthetic(spec);
	const fs::path path(out_path);
	if (path.has_parent_path()) fs::create_directories(path.parent_path());
	loadcast::io::write_series_csv(path, series);
	json sidecar = spec.to_json();
	sidecar["rows"] = series.size();
	sidecar["rng"] = loadcast::kRngName;
	loadcast::io::write_json_file(path.string() + ".meta.json", sidecar);
	std::cout << "wrote " << path.string() << " (" << series.size() << " rows)\n";
	return kExitOk;
}

int cmd_prepare(const loadcast::RunConfig& config) {
	if (config.datasets.empty()) {
		std::cerr << "prepare: no datasets in the configuration\n";
		return kExitData;
	}
	const fs::path prepared_dir = fs::path(config.out_dir) / "prepared";
	fs::create_directories(prepared_dir);
	for (const auto& entry : config.datasets) {
		loadcast::UniformSeries original = loadcast::io::read_series_csv(entry.path);
		if (entry.step_seconds > 0 && entry.step_seconds != original.step_seconds) {
			throw loadcast::DataError(entry.path + ": declared step " +
			                          std::to_string(entry.step_seconds) + " s but the file has " +
			                          std::to_string(original.step_seconds) + " s");
		}
		const auto variants = loadcast::prepare_dataset(original, entry.id, config.adjustment);
		for (const auto& variant : variants) {
			const fs::path csv_path =
			    prepared_dir / (entry.id + "_" + variant.profile.name() + ".csv");
			loadcast::io::write_series_csv(csv_path, variant.series);
			loadcast::io::write_json_file(csv_path.string() + ".meta.json", variant.metadata);
		}
		std::cout << "prepared " << entry.id << " -> 5min/15min/1h\n";
	}
	loadcast::io::write_json_file(fs::path(config.out_dir) / "prepare_manifest.json",
	                              loadcast::run_manifest(config));
	return kExitOk;
}

std::vector<loadcast::bench::MethodId> parse_methods(const std::vector<std::string>& names) {
	std::vector<loadcast::bench::MethodId> methods;
	for (const auto& name : names) methods.push_back(loadcast::bench::parse_method(name));
	return methods;
}

std::vector<loadcast::RateProfile> parse_rates(const std::vector<std::string>& names) {
	std::vector<loadcast::RateProfile> rates;
	for (const auto& name : names) rates.push_back(loadcast::RateProfile::parse(name));
	return rates;
}

int cmd_run(const loadcast::RunConfig& config, bool dry_run) {
	using namespace loadcast::bench;
	if (config.datasets.empty()) {
		std::cerr << "run: no datasets in the configuration\n";
		return kExitData;
	}
	std::vector<std::string> dataset_ids;
	for (const auto& entry : config.datasets) dataset_ids.push_back(entry.id);

	const auto specs = build_grid(dataset_ids, parse_rates(config.rates),
	                              parse_methods(config.methods), config.seed,
	                              config.update_period);

	fs::create_directories(config.out_dir);
	if (dry_run) {
		json cells = json::array();
		std::size_t available = 0;
		for (const auto& spec : specs) {
			const auto availability = method_available(spec.method, spec.profile.rate);
			if (availability.available) ++available;
			cells.push_back({{"dataset", spec.dataset_id},
			                 {"rate", spec.profile.name()},
			                 {"method", method_name(spec.method)},
			                 {"available", availability.available},
			                 {"reason", availability.reason}});
		}
		const json schedule = {{"cells", cells},
		                       {"total", specs.size()},
		                       {"available", available},
		                       {"unavailable", specs.size() - available}};
		loadcast::io::write_json_file(fs::path(config.out_dir) / "schedule.json", schedule);
		std::cout << "scheduled " << specs.size() << " cells (" << available << " available, "
		          << specs.size() - available << " unavailable)\n";
		return kExitOk;
	}

	// Load every prepared variant up front so missing files fail early.
	std::map<std::string, loadcast::UniformSeries> prepared;
	for (const auto& entry : config.datasets) {
		for (const auto& rate : parse_rates(config.rates)) {
			const fs::path path = prepared_csv_path(config, entry.id, rate);
			if (!fs::exists(path)) {
				std::cerr << "run: missing prepared dataset " << path.string()
				          << " (run `loadcast prepare` first)\n";
				return kExitData;
			}
			prepared.emplace(entry.id + "|" + rate.name(), loadcast::io::read_series_csv(path));
		}
	}

	RunOptions options;
	options.budget = config.budget;
	options.space = config.search_space;
	options.gru_space = config.gru_space;
	options.cnn_space = config.cnn_space;
	options.grids = config.grids;
	options.train.max_epochs = config.max_epochs;
	options.train.early_stop_patience = config.early_stop_patience;
	options.train.batch_size = config.batch_size;

	const auto resolver = [&](const std::string& id,
	                          const loadcast::RateProfile& profile) -> const loadcast::UniformSeries& {
		return prepared.at(id + "|" + profile.name());
	};
	const auto progress = [&](const CellOutcome& outcome) {
		std::cerr << outcome.result.rate << " " << outcome.result.dataset_id << " "
		          << outcome.result.method << ": " << outcome.result.status;
		if (outcome.result.status == "ok") {
			std::cerr << " smape=" << loadcast::bench::format_double(outcome.result.smape);
		}
		std::cerr << "\n";
	};

	const auto outcomes = run_grid(specs, resolver, options, 1, progress);

	std::ostringstream results_stream;
	const fs::path trials_dir = fs::path(config.out_dir) / "trials";
	fs::create_directories(trials_dir);
	bool any_failed = false;
	for (const auto& outcome : outcomes) {
		results_stream << outcome.result.to_json().dump() << '\n';
		if (outcome.result.status == "failed") any_failed = true;
		if (!outcome.trials.empty()) {
			std::ostringstream trace;
			for (const auto& trial : outcome.trials) trace << trial.to_json().dump() << '\n';
			const std::string name = outcome.result.dataset_id + "_" + outcome.result.rate + "_" +
			                         outcome.result.method + ".trials.jsonl";
			loadcast::io::write_text_file(trials_dir / name, trace.str());
		}
	}
	loadcast::io::write_text_file(fs::path(config.out_dir) / "results.jsonl", results_stream.str());
	loadcast::io::write_json_file(fs::path(config.out_dir) / "manifest.json",
	                              loadcast::run_manifest(config));
	std::cout << "wrote " << (fs::path(config.out_dir) / "results.jsonl").string() << " ("
	          << outcomes.size() << " cells)\n";
	return any_failed ? kExitExperimentFailures : kExitOk;
}

int cmd_report(const std::string& results_path, const std::string& out_dir) {
	using namespace loadcast::bench;
	std::vector<ExperimentResult> results;
	std::istringstream lines(loadcast::io::read_text_file(results_path));
	std::string line;
	std::size_t line_number = 0;
	while (std::getline(lines, line)) {
		++line_number;
		if (line.empty()) continue;
		try {
			results.push_back(ExperimentResult::from_json(json::parse(line)));
		} catch (const json::exception& e) {
			throw loadcast::DataError(results_path + ":" + std::to_string(line_number) + ": " +
			                          e.what());
		}
	}
	if (results.empty()) {
		std::cerr << "report: no results in " << results_path << "\n";
		return kExitData;
	}

	const fs::path report_dir = fs::path(out_dir) / "report";
	fs::create_directories(report_dir);
	const auto table = aggregate(results);
	loadcast::io::write_text_file(report_dir / "smape.csv", render_table_csv(table, false));
	loadcast::io::write_text_file(report_dir / "rmse.csv", render_table_csv(table, true));
	loadcast::io::write_text_file(report_dir / "table.md", render_table_markdown(table));
	loadcast::io::write_text_file(report_dir / "mean_summary.csv",
	                              render_mean_csv(mean_summaries(results)));
	loadcast::io::write_text_file(report_dir / "durations.csv",
	                              render_duration_csv(duration_summaries(results)));
	std::cout << "wrote report to " << report_dir.string() << "\n";
	return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"loadcast: load-forecasting toolkit and benchmark harness"};
	app.require_subcommand(1);

	// synth
	auto* synth = app.add_subcommand("synth", "generate a synthetic ingress-rate trace");
	loadcast::SynthSpec synth_spec;
	std::string synth_out = "synth.csv";
	synth->add_option("--out", synth_out, "output CSV path");
	synth->add_option("--days", synth_spec.days, "trace length in days");
	synth->add_option("--step", synth_spec.step_seconds, "sampling step in seconds");
	synth->add_option("--seed", synth_spec.seed, "RNG seed");
	synth->add_option("--base", synth_spec.base, "base level (messages/second)");
	synth->add_option("--daily", synth_spec.daily_rel, "first daily harmonic (relative)");
	synth->add_option("--daily2", synth_spec.daily2_rel, "second daily harmonic (relative)");
	synth->add_option("--daily3", synth_spec.daily3_rel, "third daily harmonic (relative)");
	synth->add_option("--weekly", synth_spec.weekly_rel, "weekly cycle (relative)");
	synth->add_option("--amp-mod", synth_spec.weekly_amp_mod,
	                  "weekly modulation of the daily amplitude (relative)");
	synth->add_option("--trend", synth_spec.trend_rel_per_day, "trend per day (relative)");
	synth->add_option("--noise", synth_spec.noise_rel, "multiplicative noise sigma (relative)");

	auto add_common = [](CLI::App* cmd, CommonFlags& flags, bool need_config) {
		auto* config_option = cmd->add_option("--config", flags.config_path, "run configuration JSON");
		if (need_config) config_option->required();
		cmd->add_option("--out", flags.out_dir, "output directory (overrides the config)");
		cmd->add_option("--seed", flags.seed, "seed override")->each([&flags](const std::string&) {
			flags.seed_set = true;
		});
		cmd->add_option("--datasets", flags.datasets, "comma-separated dataset filter");
	};

	// prepare
	auto* prepare = app.add_subcommand("prepare", "adjust datasets to the three sampling rates");
	CommonFlags prepare_flags;
	add_common(prepare, prepare_flags, true);

	// run
	auto* run = app.add_subcommand("run", "execute the experiment grid");
	CommonFlags run_flags;
	add_common(run, run_flags, true);
	run->add_option("--methods", run_flags.methods, "comma-separated method filter");
	run->add_option("--rates", run_flags.rates, "comma-separated rate filter (5min,15min,1h)");
	run->add_option("--parallelism", run_flags.parallelism, "worker threads for searches");
	run->add_option("--max-trials", run_flags.max_trials, "neural search trial budget");
	bool dry_run = false;
	run->add_flag("--dry-run", dry_run, "print the schedule without executing");

	// report
	auto* report = app.add_subcommand("report", "render tables and plot data from results");
	std::string results_path;
	std::string report_out = "out";
	report->add_option("--results", results_path, "results.jsonl path")->required();
	report->add_option("--out", report_out, "output directory");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		const int code = app.exit(e);
		return code == 0 ? kExitOk : kExitUsage;
	}

	try {
		if (synth->parsed()) return cmd_synth(synth_spec, synth_out);
		if (prepare->parsed()) return cmd_prepare(load_config(prepare_flags));
		if (run->parsed()) return cmd_run(load_config(run_flags), dry_run);
		if (report->parsed()) return cmd_report(results_path, report_out);
	} catch (const loadcast::DataError& e) {
		std::cerr << "error: " << e.what() << "\n";
		return kExitData;
	} catch (const loadcast::Error& e) {
		std::cerr << "error: " << e.what() << "\n";
		return kExitData;
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << "\n";
		return kExitData;
	}
	return kExitUsage;
}
