/*
 * Copyright 2026 The Fedscan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fedscan/error.hpp"
#include "fedscan/federate.hpp"
#include "fedscan/io.hpp"
#include "fedscan/regress.hpp"
#include "fedscan/scan.hpp"
#include "fedscan/secure.hpp"
#include "fedscan/simulate.hpp"

namespace {

using namespace fedscan;

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    io::write_text_file_atomic(out_path, text);
  }
}

struct CenterOption {
  std::string mode = "none";  // none | per-party | global

  bool per_party() const { return mode == "per-party"; }
  bool global() const { return mode == "global"; }
  void validate() const {
    if (mode != "none" && mode != "per-party" && mode != "global") {
      throw CLI::ValidationError("--center must be none, per-party or global");
    }
  }
};

int run_regress(const std::string& data_path, const std::string& response,
                const std::string& covariates, const std::string& out_path) {
  io::DatasetSchema schema;
  schema.responses = {response};
  schema.covariates = split_list(covariates);
  schema.features = {};
  const io::PartyDataset ds = io::load_dataset(data_path, schema);
  const auto result =
      regress::regression_stats(regress::compress_regression(ds.y, ds.c));
  emit(out_path, io::regression_result_tsv(result, ds.covariate_names));
  return 0;
}

int run_scan(const std::string& data_path, const std::string& responses,
             const std::string& features, const std::string& covariates,
             Index block_size, int threads, const CenterOption& center,
             const std::string& out_path) {
  io::DatasetSchema schema;
  schema.responses = split_list(responses);
  schema.features = split_list(features);
  schema.covariates = split_list(covariates);
  const io::PartyDataset ds = io::load_dataset(data_path, schema);

  scan::ScanInputs inputs;
  if (center.global() || center.per_party()) {
    // A single dataset is one party, so both modes subtract its own means
    // and absorb one intercept-equivalent degree of freedom.
    inputs.y = federate::center_columns(ds.y).data;
    inputs.x = federate::center_columns(ds.x).data;
    inputs.c = federate::center_columns(ds.c).data;
    inputs.absorbed = 1;
  } else {
    inputs.y = ds.y;
    inputs.x = ds.x;
    inputs.c = ds.c;
  }
  const scan::ScanResult result = scan::scan(inputs, block_size, threads);
  emit(out_path,
       io::scan_result_tsv(result, ds.feature_names, ds.response_names));
  return 0;
}

int run_compress(const std::string& data_path, const std::string& responses,
                 const std::string& features, const std::string& covariates,
                 const CenterOption& center, std::string party_id,
                 const std::string& out_path) {
  io::DatasetSchema schema;
  schema.responses = split_list(responses);
  schema.features = split_list(features);
  schema.covariates = split_list(covariates);
  const io::PartyDataset ds = io::load_dataset(data_path, schema);
  if (party_id.empty()) {
    party_id = std::filesystem::path(data_path).stem().string();
  }

  federate::PartyCompressed part;
  if (center.per_party()) {
    part = federate::compress_party(federate::center_columns(ds.y).data,
                                    federate::center_columns(ds.x).data,
                                    federate::center_columns(ds.c).data,
                                    party_id, /*absorbed=*/1);
  } else {
    part = federate::compress_party(ds.y, ds.x, ds.c, party_id);
  }
  io::write_binary_file_atomic(out_path, io::encode_message(part));
  return 0;
}

int run_combine(const std::vector<std::string>& in_paths,
                const std::string& out_path, bool use_secure,
                const std::string& seeds_path, std::uint64_t round_id,
                const std::string& r_policy) {
  std::vector<federate::PartyCompressed> parts;
  parts.reserve(in_paths.size());
  for (const std::string& path : in_paths) {
    parts.push_back(io::decode_party(io::read_binary_file(path)));
  }
  federate::CombinedStats combined;
  if (use_secure) {
    if (seeds_path.empty()) {
      throw CLI::ValidationError("--secure requires --seeds");
    }
    const secure::SeedTable seeds = io::load_seeds(seeds_path);
    const secure::RPolicy policy = r_policy == "plaintext-stack"
                                       ? secure::RPolicy::kPlaintextStack
                                       : secure::RPolicy::kMaskedGram;
    combined = secure::secure_combine(parts, seeds, round_id, policy);
  } else {
    combined = federate::combine(parts);
  }
  io::write_binary_file_atomic(out_path, io::encode_message(combined));
  return 0;
}

int run_finalize(const std::string& in_path, const std::string& out_path) {
  const federate::CombinedStats combined =
      io::decode_combined(io::read_binary_file(in_path));
  const scan::ScanResult result = federate::finalize_scan(combined);
  std::vector<std::string> features, responses;
  for (Index j = 0; j < combined.m(); ++j)
    features.push_back("feature" + std::to_string(j + 1));
  for (Index j = 0; j < combined.t(); ++j)
    responses.push_back("response" + std::to_string(j + 1));
  emit(out_path, io::scan_result_tsv(result, features, responses));
  return 0;
}

int run_merge(const std::string& combined_path, const std::string& in_path,
              const std::string& out_path) {
  const federate::CombinedStats existing =
      io::decode_combined(io::read_binary_file(combined_path));
  const federate::PartyCompressed part =
      io::decode_party(io::read_binary_file(in_path));
  const federate::CombinedStats merged =
      federate::merge_combined(existing, part);
  io::write_binary_file_atomic(out_path, io::encode_message(merged));
  return 0;
}

void write_simulated_files(const sim::SimConfig& config,
                           const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const sim::SimData data = sim::generate(config);
  for (std::size_t q = 0; q < data.party_ids.size(); ++q) {
    io::PartyDataset ds;
    const Index off = data.party_offsets[q];
    const Index rows = data.party_sizes[q];
    ds.y = data.y.middleRows(off, rows);
    ds.x = data.x.middleRows(off, rows);
    ds.c = data.c.middleRows(off, rows);
    for (Index i = 0; i < rows; ++i) {
      ds.sample_ids.push_back(data.party_ids[q] + "_s" +
                              std::to_string(off + i + 1));
    }
    for (Index j = 0; j < ds.y.cols(); ++j)
      ds.response_names.push_back("y" + std::to_string(j + 1));
    for (Index j = 0; j < ds.x.cols(); ++j)
      ds.feature_names.push_back("x" + std::to_string(j + 1));
    for (Index j = 0; j < ds.c.cols(); ++j)
      ds.covariate_names.push_back("c" + std::to_string(j + 1));
    io::save_dataset(
        (fs::path(out_dir) / (data.party_ids[q] + ".tsv")).string(), ds);
  }
  const secure::SeedTable seeds = sim::derive_seed_table(data, config.seed);
  std::ostringstream seed_text;
  seed_text << "# pairwise masking seeds\n";
  for (const auto& [pair, seed] : seeds.seeds) {
    seed_text << pair.first << '\t' << pair.second << '\t';
    for (std::uint8_t byte : seed) {
      char buf[3];
      std::snprintf(buf, sizeof buf, "%02x", byte);
      seed_text << buf;
    }
    seed_text << '\n';
  }
  io::write_text_file_atomic((fs::path(out_dir) / "seeds.tsv").string(),
                             seed_text.str());
}

int run_simulate(const sim::SimConfig& config, bool use_secure,
                 double tolerance, double secure_tolerance,
                 const std::string& out_dir) {
  if (!out_dir.empty()) {
    write_simulated_files(config, out_dir);
  }
  const sim::PipelineReport report = sim::run_pipeline(config, use_secure);
  std::cout << "simulate: parties=" << config.parties
            << " samples=" << config.samples
            << " features=" << config.features
            << " covariates=" << config.covariates
            << " responses=" << config.responses << " seed=" << config.seed
            << " secure=" << (use_secure ? 1 : 0) << '\n';
  std::cout << "valid_cells=" << report.valid_cells << '\n';
  std::cout << "valid_mismatches=" << report.valid_mismatches << '\n';
  std::cout << "max_rel_diff_beta=" << io::format_double(report.max_rel_beta)
            << '\n';
  std::cout << "max_rel_diff_se=" << io::format_double(report.max_rel_se)
            << '\n';
  std::cout << "max_rel_diff_t=" << io::format_double(report.max_rel_t)
            << '\n';
  if (use_secure) {
    std::cout << "secure_max_rel_diff_t="
              << io::format_double(report.secure_max_rel_t) << '\n';
  }
  const bool ok = report.passes(tolerance, secure_tolerance);
  std::cout << "result: " << (ok ? "OK" : "DISCREPANT") << " (tolerance "
            << io::format_double(tolerance) << ")" << '\n';
  return ok ? 0 : 1;
}

int cli_main(int argc, char** argv) {
  CLI::App app{
      "fedscan: exact multi-party linear regression and association scans.\n"
      "Parties compress their data to covariate-dimension statistics; "
      "combining those reproduces the pooled analysis exactly."};
  app.require_subcommand(1);

  auto* regress_cmd =
      app.add_subcommand("regress", "Linear regression on one dataset");
  std::string data_path, response, covariates, out_path;
  regress_cmd->add_option("--data", data_path, "TSV dataset")->required();
  regress_cmd->add_option("--response", response, "response column")
      ->required();
  regress_cmd
      ->add_option("--covariates", covariates,
                   "comma-separated covariate columns (prefix* allowed)")
      ->required();
  regress_cmd->add_option("--out", out_path, "output path (default stdout)");

  auto* scan_cmd = app.add_subcommand(
      "scan", "Association scan: test each feature against each response");
  std::string scan_data, scan_responses, scan_features, scan_covariates,
      scan_out;
  Index block_size = 256;
  int threads = 1;
  CenterOption scan_center;
  scan_cmd->add_option("--data", scan_data, "TSV dataset")->required();
  scan_cmd
      ->add_option("--responses,--response", scan_responses,
                   "response column(s), comma separated")
      ->required();
  scan_cmd
      ->add_option("--features", scan_features,
                   "feature columns (prefix* allowed)")
      ->required();
  scan_cmd->add_option("--covariates", scan_covariates,
                       "permanent covariate columns (may be empty)");
  scan_cmd->add_option("--block-size", block_size, "feature block size");
  scan_cmd->add_option("--threads", threads, "worker threads");
  scan_cmd->add_option("--center", scan_center.mode,
                       "none | global | per-party (absorbs one df)");
  scan_cmd->add_option("--out", scan_out, "output TSV (default stdout)");

  auto* compress_cmd = app.add_subcommand(
      "compress", "Reduce one party's data to its compressed statistics");
  std::string comp_data, comp_responses, comp_features, comp_covariates,
      comp_out, comp_party;
  CenterOption comp_center;
  compress_cmd->add_option("--data", comp_data, "TSV dataset")->required();
  compress_cmd
      ->add_option("--responses,--response", comp_responses,
                   "response column(s)")
      ->required();
  compress_cmd->add_option("--features", comp_features, "feature columns")
      ->required();
  compress_cmd->add_option("--covariates", comp_covariates,
                           "permanent covariate columns");
  compress_cmd->add_option("--out", comp_out, "output message path")
      ->required();
  compress_cmd->add_option("--party-id", comp_party,
                           "party identifier (default: file stem)");
  compress_cmd->add_option("--center", comp_center.mode,
                           "none | per-party (center locally, absorb one df)");

  auto* combine_cmd = app.add_subcommand(
      "combine", "Combine compressed party messages into pooled statistics");
  std::vector<std::string> combine_in;
  std::string combine_out, seeds_path, r_policy = "masked-gram";
  bool combine_secure = false;
  std::uint64_t round_id = 1;
  combine_cmd->add_option("--in", combine_in, "party message files")
      ->required()
      ->expected(-1);
  combine_cmd->add_option("--out", combine_out, "combined output path")
      ->required();
  combine_cmd->add_flag("--secure", combine_secure,
                        "aggregate through additive masking");
  combine_cmd->add_option("--seeds", seeds_path, "pairwise seeds TSV");
  combine_cmd->add_option("--round", round_id, "masking round id");
  combine_cmd->add_option("--r-policy", r_policy,
                          "masked-gram | plaintext-stack");

  auto* finalize_cmd =
      app.add_subcommand("finalize", "Scan statistics from combined statistics");
  std::string fin_in, fin_out;
  finalize_cmd->add_option("--in", fin_in, "combined statistics file")
      ->required();
  finalize_cmd->add_option("--out", fin_out, "output TSV (default stdout)");

  auto* merge_cmd = app.add_subcommand(
      "merge", "Fold one more party into existing combined statistics");
  std::string merge_combined, merge_in, merge_out;
  merge_cmd->add_option("--combined", merge_combined, "existing combined file")
      ->required();
  merge_cmd->add_option("--in", merge_in, "new party message")->required();
  merge_cmd->add_option("--out", merge_out, "output combined file")
      ->required();

  auto* sim_cmd = app.add_subcommand(
      "simulate",
      "Generate synthetic parties, run pooled and federated pipelines, "
      "report the worst relative discrepancy");
  sim::SimConfig config;
  bool sim_secure = false;
  double tolerance = 1e-8, secure_tolerance = 1e-5;
  std::string sim_out_dir;
  sim_cmd->add_option("--parties", config.parties, "party count");
  sim_cmd->add_option("--samples", config.samples, "total samples");
  sim_cmd->add_option("--features", config.features, "feature count");
  sim_cmd->add_option("--covariates", config.covariates, "covariate count");
  sim_cmd->add_option("--responses", config.responses, "response count");
  sim_cmd->add_option("--seed", config.seed, "generator seed");
  sim_cmd->add_flag("--secure", sim_secure, "also run the masked combine");
  sim_cmd->add_option("--tolerance", tolerance, "pass threshold on |dt|/|t|");
  sim_cmd->add_option("--secure-tolerance", secure_tolerance,
                      "pass threshold for the masked path");
  sim_cmd->add_option("--out-dir", sim_out_dir,
                      "write per-party TSVs and a seeds file here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help
    }
    std::cerr << "error: Usage: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*regress_cmd) {
      return run_regress(data_path, response, covariates, out_path);
    }
    if (*scan_cmd) {
      scan_center.validate();
      return run_scan(scan_data, scan_responses, scan_features,
                      scan_covariates, block_size, threads, scan_center,
                      scan_out);
    }
    if (*compress_cmd) {
      comp_center.validate();
      if (comp_center.global()) {
        throw CLI::ValidationError(
            "compress supports --center per-party only; global centering "
            "needs pooled means no single party holds");
      }
      return run_compress(comp_data, comp_responses, comp_features,
                          comp_covariates, comp_center, comp_party, comp_out);
    }
    if (*combine_cmd) {
      if (r_policy != "masked-gram" && r_policy != "plaintext-stack") {
        throw CLI::ValidationError(
            "--r-policy must be masked-gram or plaintext-stack");
      }
      return run_combine(combine_in, combine_out, combine_secure, seeds_path,
                         round_id, r_policy);
    }
    if (*finalize_cmd) {
      return run_finalize(fin_in, fin_out);
    }
    if (*merge_cmd) {
      return run_merge(merge_combined, merge_in, merge_out);
    }
    if (*sim_cmd) {
      return run_simulate(config, sim_secure, tolerance, secure_tolerance,
                          sim_out_dir);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: Usage: " << e.what() << '\n';
    return 2;
  } catch (const fedscan::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return fedscan::error_exit_status(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return cli_main(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << '\n';
    return 1;
  } catch (...) {
    std::cerr << "error: Internal: unknown failure" << '\n';
    return 1;
  }
}
