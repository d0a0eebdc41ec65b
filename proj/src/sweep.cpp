#include "cavernsim/scenarios.hpp"

#include "cavernsim/error.hpp"

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <iomanip>
#include <locale>
#include <sstream>
#include <thread>

namespace cavernsim {

namespace {

double parse_number(const std::string& text, const std::string& context)
{
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') {
    ++first;
  }
  while (last > first && last[-1] == ' ') {
    --last;
  }
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw ValidationError(context, "'" + text + "' is not a number");
  }
  return v;
}

std::string format_value(double v)
{
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << std::setprecision(10) << v;
  return out.str();
}

std::string label_of(const std::vector<std::pair<std::string, double>>& assignments)
{
  if (assignments.empty()) {
    return "base";
  }
  std::string label;
  for (const auto& [path, value] : assignments) {
    if (!label.empty()) {
      label += ';';
    }
    label += path + '=' + format_value(value);
  }
  return label;
}

std::vector<std::vector<std::pair<std::string, double>>> enumerate(const std::vector<SweepAxis>& axes, SweepMode mode)
{
  std::vector<std::vector<std::pair<std::string, double>>> out;
  if (mode == SweepMode::OneAtATime) {
    out.emplace_back();
    for (const auto& axis : axes) {
      for (double v : axis.values) {
        out.push_back({{axis.path, v}});
      }
    }
    return out;
  }
  out.emplace_back();
  for (const auto& axis : axes) {
    std::vector<std::vector<std::pair<std::string, double>>> grown;
    for (const auto& prefix : out) {
      for (double v : axis.values) {
        auto next = prefix;
        next.emplace_back(axis.path, v);
        grown.push_back(std::move(next));
      }
    }
    out = std::move(grown);
  }
  return out;
}

} // namespace

SweepAxis parse_sweep_axis(const std::string& text)
{
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError("axis", "expected PATH=v1,v2,... but got '" + text + "'");
  }
  SweepAxis axis;
  axis.path = text.substr(0, eq);
  std::istringstream values(text.substr(eq + 1));
  std::string item;
  while (std::getline(values, item, ',')) {
    axis.values.push_back(parse_number(item, "axis " + axis.path));
  }
  if (axis.values.empty()) {
    throw ValidationError("axis " + axis.path, "no values given");
  }
  return axis;
}

unsigned default_thread_count()
{
  if (const char* env = std::getenv("CAVERNSIM_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) {
      return static_cast<unsigned>(n);
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult run_sweep(const Scenario& base, const std::vector<SweepAxis>& axes, SweepMode mode, unsigned threads)
{
  SweepResult result;
  std::vector<Scenario> scenarios;
  for (auto& assignments : enumerate(axes, mode)) {
    Scenario s = base;
    for (const auto& [path, value] : assignments) {
      s = with_assignment(s, path, value);
    }
    validate(s);
    SweepVariant v;
    v.label = label_of(assignments);
    v.assignments = std::move(assignments);
    result.variants.push_back(std::move(v));
    scenarios.push_back(std::move(s));
  }

  if (threads == 0) {
    threads = default_thread_count();
  }
  threads = std::min<unsigned>(threads, static_cast<unsigned>(scenarios.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        result.variants[i].artifact = run_scenario(scenarios[i]).artifact;
      } catch (const std::exception& e) {
        result.variants[i].error = e.what();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  return result;
}

void export_sweep_csv(const SweepResult& result, std::ostream& out)
{
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(17) << "variant,assignment,t_day,probe,u_x,u_y,s_vm,D\n";
  for (std::size_t i = 0; i < result.variants.size(); ++i) {
    const auto& v = result.variants[i];
    if (!v.artifact) {
      continue;
    }
    for (const auto& p : v.artifact->probes) {
      buf << i << ',' << v.label << ',' << p.t << ',' << p.probe << ',' << p.u_x << ',' << p.u_y << ',' << p.s_vm
          << ',' << p.damage << '\n';
    }
  }
  out << buf.str();
}

} // namespace cavernsim
