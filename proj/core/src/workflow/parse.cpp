#include <algorithm>
#include <cctype>
#include <sstream>

#include "cie/agent/agent.hpp"
#include "cie/error.hpp"
#include "cie/text.hpp"
#include "cie/workflow/workflow.hpp"

namespace cie {

namespace {

constexpr std::string_view kPlanMarker = "primary plan:";
constexpr std::string_view kRevisedMarker = "REVISED PLAN:";

// "3. text" or "3) text"; returns the item text.
std::optional<std::string> numbered_item(std::string_view line) {
  line = text::trim(line);
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i == 0 || i >= line.size() || (line[i] != '.' && line[i] != ')')) return std::nullopt;
  auto item = text::trim(line.substr(i + 1));
  if (item.empty()) return std::nullopt;
  return std::string(item);
}

std::vector<std::string> lines_of(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

// Numbered items directly after the marker; blank lines inside the list are
// tolerated, anything else ends it.
std::vector<std::string> numbered_list(std::string_view body) {
  std::vector<std::string> items;
  for (const auto& line : lines_of(body)) {
    if (text::trim(line).empty()) continue;
    auto item = numbered_item(line);
    if (!item) {
      if (items.empty()) continue;
      break;
    }
    items.push_back(std::move(*item));
  }
  return items;
}

std::vector<std::vector<std::size_t>> parallel_groups(std::string_view reply, std::size_t n_steps) {
  std::vector<std::vector<std::size_t>> groups;
  for (const auto& line : lines_of(reply)) {
    const auto lower = text::to_lower_ascii(text::trim(line));
    if (!lower.starts_with("parallel:")) continue;
    std::vector<std::size_t> group;
    std::string digits;
    auto flush = [&] {
      if (digits.empty()) return;
      const auto idx = std::stoul(digits);
      digits.clear();
      if (idx >= 1 && idx <= n_steps) group.push_back(idx - 1);
    };
    for (char c : lower.substr(9)) {
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digits.push_back(c);
      } else {
        flush();
      }
    }
    flush();
    std::sort(group.begin(), group.end());
    group.erase(std::unique(group.begin(), group.end()), group.end());
    if (group.size() >= 2) groups.push_back(std::move(group));
  }
  return groups;
}

bool ieq_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  }
  return true;
}

}  // namespace

PrimaryPlan parse_plan(std::string_view reply) {
  const auto visible = strip_think(reply);
  const auto lower = text::to_lower_ascii(visible);
  const auto marker = lower.rfind(kPlanMarker);
  if (marker == std::string::npos) throw PlanningError("planner reply has no 'Primary Plan:' section");
  PrimaryPlan plan;
  plan.analysis = std::string(text::trim(std::string_view(visible).substr(0, marker)));
  const auto body = std::string_view(visible).substr(marker + kPlanMarker.size());
  plan.steps = numbered_list(body);
  if (plan.steps.empty()) throw PlanningError("planner reply has no numbered steps after 'Primary Plan:'");
  plan.parallel_groups = parallel_groups(body, plan.steps.size());
  return plan;
}

Directive parse_directive(std::string_view reply) {
  const auto visible = strip_think(reply);
  Directive d;
  d.analysis = std::string(text::trim(visible));

  std::string_view body_all = d.analysis;
  if (const auto rev = body_all.find(kRevisedMarker); rev != std::string_view::npos) {
    auto steps = numbered_list(body_all.substr(rev + kRevisedMarker.size()));
    if (!steps.empty()) d.revised_plan = std::move(steps);
    body_all = body_all.substr(0, rev);
  }

  struct Keyword {
    std::string_view word;
    int kind;
  };
  static constexpr Keyword kKeywords[] = {{"PROCEED:", 0}, {"CONCLUDE:", 1}, {"REFINE:", 2}};

  std::optional<int> kind;
  std::size_t body_start = 0;
  // A keyword at the start wins, in any case and after markdown decoration.
  auto lead = body_all;
  while (!lead.empty() && std::string_view("*#>-_ \t\r\n").find(lead.front()) != std::string_view::npos) {
    lead.remove_prefix(1);
  }
  for (const auto& k : kKeywords) {
    if (ieq_prefix(lead, k.word)) {
      kind = k.kind;
      body_start = static_cast<std::size_t>(lead.data() - body_all.data()) + k.word.size();
      break;
    }
  }
  if (!kind) {
    std::size_t best = std::string_view::npos;
    for (const auto& k : kKeywords) {
      const auto pos = body_all.find(k.word);
      if (pos < best) {
        best = pos;
        kind = k.kind;
        body_start = pos + k.word.size();
      }
    }
  }
  if (!kind) {
    d.kind = ReflectRefine{"unparseable", d.analysis};
    return d;
  }

  auto body = std::string(text::trim(body_all.substr(body_start)));
  while (!body.empty() && body.front() == '*') body.erase(0, 1);
  body = std::string(text::trim(body));
  switch (*kind) {
    case 0:
      d.kind = Proceed{body};
      break;
    case 1:
      d.kind = Conclude{body};
      break;
    default: {
      auto sentences = text::split_sentences(body);
      ReflectRefine r;
      if (sentences.size() <= 1) {
        r.diagnosis = body;
        r.refined_strategy = body;
      } else {
        r.diagnosis = sentences.front();
        for (std::size_t i = 1; i < sentences.size(); ++i) {
          if (i > 1) r.refined_strategy += ' ';
          r.refined_strategy += sentences[i];
        }
      }
      d.kind = std::move(r);
    }
  }
  return d;
}

}  // namespace cie
