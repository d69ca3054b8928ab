#include "nematic/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nematic {

const char* const kTrajectoryHeader =
    "step,t,dt,steps,total_energy,kinetic,elastic,bulk,dissipation,budget_defect,"
    "signed_defect,max_abs_d,grad_u_norm,residual_norm";

std::string trajectory_csv(const std::vector<StepReport>& reports) {
  std::string out = kTrajectoryHeader;
  out += "\n";
  char buf[512];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf,
                  "%ld,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.step, r.t, r.dt, r.steps, r.total_energy, r.kinetic, r.elastic, r.bulk,
                  r.dissipation, r.budget_defect, r.signed_defect, r.max_abs_d, r.grad_u_norm,
                  r.residual_norm);
    out += buf;
  }
  return out;
}

std::vector<StepReport> read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": missing");
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader) {
    throw std::runtime_error(path.string() + ": unexpected header");
  }
  std::vector<StepReport> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 14) {
      throw std::runtime_error(path.string() + ": line " + std::to_string(lineno) +
                               " has " + std::to_string(cells.size()) + " fields, expected 14");
    }
    StepReport r;
    try {
      r.step = std::stol(cells[0]);
      r.t = std::stod(cells[1]);
      r.dt = std::stod(cells[2]);
      r.steps = std::stoi(cells[3]);
      double* dst[] = {&r.total_energy, &r.kinetic,      &r.elastic,   &r.bulk,
                       &r.dissipation,  &r.budget_defect, &r.signed_defect, &r.max_abs_d,
                       &r.grad_u_norm,  &r.residual_norm};
      for (int k = 0; k < 10; ++k) *dst[k] = std::stod(cells[4 + k]);
    } catch (const std::exception&) {
      throw std::runtime_error(path.string() + ": line " + std::to_string(lineno) +
                               " is not numeric");
    }
    if (!out.empty() && !(r.t > out.back().t)) {
      throw std::runtime_error(path.string() + ": line " + std::to_string(lineno) +
                               " does not increase t");
    }
    out.push_back(r);
  }
  if (out.empty()) throw std::runtime_error(path.string() + ": no rows");
  return out;
}

nlohmann::ordered_json run_info_to_json(const RunInfo& i) {
  nlohmann::ordered_json j;
  j["outcome"] = to_string(i.outcome);
  j["message"] = i.message;
  j["dt"] = i.dt;
  j["budget_constant"] = i.budget_constant;
  j["budget_tol"] = i.budget_tol;
  j["delta"] = i.delta;
  j["d0_max"] = i.d0_max;
  j["director_only"] = i.director_only;
  j["D_stop"] = i.D_stop;
  j["d_stop"] = i.d_stop;
  j["T_win"] = i.T_win;
  j["steps"] = i.steps;
  j["final_window_change"] = i.final_window_change;
  return j;
}

RunInfo run_info_from_json(const nlohmann::json& j) {
  RunInfo i;
  const std::string outcome = j.at("outcome").get<std::string>();
  if (outcome == "converged") {
    i.outcome = RunOutcome::converged;
  } else if (outcome == "reached_t_end") {
    i.outcome = RunOutcome::reached_t_end;
  } else if (outcome == "blow_up") {
    i.outcome = RunOutcome::blow_up;
  } else {
    throw std::runtime_error("unknown outcome '" + outcome + "'");
  }
  i.message = j.at("message").get<std::string>();
  i.dt = j.at("dt").get<double>();
  i.budget_constant = j.at("budget_constant").get<double>();
  i.budget_tol = j.at("budget_tol").get<double>();
  i.delta = j.at("delta").get<double>();
  i.d0_max = j.at("d0_max").get<double>();
  i.director_only = j.at("director_only").get<bool>();
  i.D_stop = j.at("D_stop").get<double>();
  i.d_stop = j.at("d_stop").get<double>();
  i.T_win = j.at("T_win").get<double>();
  i.steps = j.at("steps").get<long>();
  i.final_window_change = j.at("final_window_change").get<double>();
  return i;
}

std::string git_blob_hash(const std::string& content) {
  std::string data = "blob " + std::to_string(content.size());
  data.push_back('\0');
  data += content;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha1(), nullptr) != 1) {
    throw std::runtime_error("SHA-1 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out.push_back(hex[md[k] >> 4]);
    out.push_back(hex[md[k] & 15]);
  }
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": missing");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace nematic
