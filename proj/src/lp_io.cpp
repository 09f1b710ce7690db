#include "gridplan/lp_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include "gridplan/common.hpp"

namespace gridplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Appends a token, breaking the line when it grows unwieldy. LP readers do
// not care about line breaks inside an expression, and some balance rows
// mention every indoor cell.
void put(std::string& out, size_t& line_len, const std::string& token) {
  if (line_len + token.size() + 1 > 200) {
    out += "\n ";
    line_len = 1;
  }
  out += ' ';
  out += token;
  line_len += token.size() + 1;
}

void put_terms(std::string& out, const std::vector<std::pair<std::string, double>>& terms,
               double constant) {
  size_t line_len = out.size() - out.rfind('\n') - 1;
  bool first = true;
  for (const auto& [name, coef] : terms) {
    if (coef == 0.0) continue;
    std::string sign = coef < 0 ? "-" : (first ? "" : "+");
    if (!sign.empty()) put(out, line_len, sign);
    put(out, line_len, lp_number(std::abs(coef)));
    put(out, line_len, name);
    first = false;
  }
  if (constant != 0.0 || first) {
    std::string sign = constant < 0 ? "-" : (first ? "" : "+");
    if (!sign.empty()) put(out, line_len, sign);
    put(out, line_len, lp_number(std::abs(constant)));
  }
}

std::vector<std::pair<std::string, double>> sorted_terms(const MilpModel& model,
                                                         const std::vector<LinTerm>& terms,
                                                         double scale) {
  std::map<std::string, double> merged;
  for (const LinTerm& t : terms) {
    merged[model.variables[t.var].name] += scale * t.coef;
  }
  std::vector<std::pair<std::string, double>> out(merged.begin(), merged.end());
  return out;
}

const char* sense_token(RowSense s) {
  switch (s) {
    case RowSense::LE: return "<=";
    case RowSense::GE: return ">=";
    default: return "=";
  }
}

// --- import side -----------------------------------------------------------

struct Token {
  enum Kind { Name, Number, Sign, Sense, Colon } kind;
  std::string text;
  double value = 0.0;
};

bool name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\\') {  // comment to end of line
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ':') {
      tokens.push_back({Token::Colon, ":"});
      ++i;
    } else if (c == '+' || c == '-') {
      tokens.push_back({Token::Sign, std::string(1, c)});
      ++i;
    } else if (c == '<' || c == '>' || c == '=') {
      size_t j = i + 1;
      if (j < text.size() && text[j] == '=') ++j;
      std::string t = text.substr(i, j - i);
      if (t == "<") t = "<=";
      if (t == ">") t = ">=";
      tokens.push_back({Token::Sense, t});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t j = i;
      while (j < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.' ||
              text[j] == 'e' || text[j] == 'E' ||
              ((text[j] == '+' || text[j] == '-') && j > i &&
               (text[j - 1] == 'e' || text[j - 1] == 'E')))) {
        ++j;
      }
      Token t{Token::Number, text.substr(i, j - i)};
      t.value = std::stod(t.text);
      tokens.push_back(t);
      i = j;
    } else if (name_start(c)) {
      size_t j = i;
      while (j < text.size() && name_char(text[j])) ++j;
      tokens.push_back({Token::Name, text.substr(i, j - i)});
      i = j;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "' in LP text");
    }
  }
  return tokens;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Section keywords as they appear in the token stream.
bool section_at(const std::vector<Token>& t, size_t i, std::string* name) {
  if (i >= t.size() || t[i].kind != Token::Name) return false;
  std::string w = lower(t[i].text);
  if (w == "minimize" || w == "maximize" || w == "bounds" || w == "end" ||
      w == "general" || w == "generals" || w == "binary" || w == "binaries") {
    *name = w;
    return true;
  }
  if ((w == "subject" && i + 1 < t.size() && lower(t[i + 1].text) == "to") || w == "st") {
    *name = "subject to";
    return true;
  }
  return false;
}

}  // namespace

std::string lp_number(double v) { return format_number(v); }

std::string export_lp(const MilpModel& model) {
  std::string out;
  out.reserve(1 << 16);
  out += "\\ gridplan";
  if (!model.metadata.scene_digest.empty()) {
    out += " scene=" + model.metadata.scene_digest;
  }
  if (!model.metadata.phase.empty()) {
    out += " phase=" + model.metadata.phase;
  }
  out += "\nMinimize\n obj:";

  std::map<std::string, double> obj;
  double constant = 0.0;
  for (const ObjectiveGroup& g : model.objective) {
    for (const LinTerm& t : g.terms) {
      obj[model.variables[t.var].name] += g.weight * t.coef;
    }
    constant += g.weight * g.constant;
  }
  put_terms(out, {obj.begin(), obj.end()}, constant);

  out += "\nSubject To\n";
  for (size_t r = 0; r < model.rows.size(); ++r) {
    out += " c" + std::to_string(r) + ":";
    put_terms(out, sorted_terms(model, model.rows[r].terms, 1.0), 0.0);
    out += ' ';
    out += sense_token(model.rows[r].sense);
    out += ' ';
    out += lp_number(model.rows[r].rhs);
    out += '\n';
  }

  std::vector<const VarDef*> by_name;
  by_name.reserve(model.variables.size());
  for (const VarDef& v : model.variables) by_name.push_back(&v);
  std::sort(by_name.begin(), by_name.end(),
            [](const VarDef* a, const VarDef* b) { return a->name < b->name; });

  std::string bounds;
  for (const VarDef* v : by_name) {
    if (v->kind == VarKind::Binary) continue;
    if (v->lo == 0.0 && v->hi == kInf) continue;
    if (v->hi == kInf) {
      bounds += " " + v->name + " >= " + lp_number(v->lo) + "\n";
    } else {
      bounds += " " + lp_number(v->lo) + " <= " + v->name + " <= " + lp_number(v->hi) + "\n";
    }
  }
  if (!bounds.empty()) out += "Bounds\n" + bounds;

  std::string generals;
  std::string binaries;
  for (const VarDef* v : by_name) {
    if (v->kind == VarKind::Integer) generals += " " + v->name + "\n";
    if (v->kind == VarKind::Binary) binaries += " " + v->name + "\n";
  }
  if (!generals.empty()) out += "Generals\n" + generals;
  if (!binaries.empty()) out += "Binaries\n" + binaries;
  out += "End\n";
  return out;
}

MilpModel import_lp(const std::string& text) {
  std::vector<Token> tokens = tokenize(text);
  MilpModel model;
  model.metadata.phase = "imported";
  // The exporter's comment header carries the scene digest and phase; reading
  // it back makes export(import(text)) reproduce text exactly.
  if (text.rfind("\\ gridplan", 0) == 0) {
    std::istringstream header(text.substr(0, text.find('\n')));
    std::string word;
    while (header >> word) {
      if (word.rfind("scene=", 0) == 0) model.metadata.scene_digest = word.substr(6);
      if (word.rfind("phase=", 0) == 0) model.metadata.phase = word.substr(6);
    }
  }

  auto var_id = [&](const std::string& name) {
    int id = model.var(name);
    if (id >= 0) return id;
    return model.add_var(name, VarKind::Continuous, 0.0, kInf);
  };

  size_t i = 0;
  std::string section;
  if (!section_at(tokens, i, &section) || (section != "minimize" && section != "maximize")) {
    throw ParseError("LP text must start with Minimize");
  }
  if (section == "maximize") throw ParseError("Maximize models are not supported");
  ++i;

  // expr := [label :] (sign? number? name | sign? number)*  until sense/section
  auto parse_expr = [&](std::map<int, double>* terms, double* constant) {
    while (i < tokens.size()) {
      std::string sec;
      if (section_at(tokens, i, &sec)) break;
      if (tokens[i].kind == Token::Sense) break;
      if (tokens[i].kind == Token::Name && i + 1 < tokens.size() &&
          tokens[i + 1].kind == Token::Colon) {
        break;  // next row label
      }
      double sign = 1.0;
      while (i < tokens.size() && tokens[i].kind == Token::Sign) {
        if (tokens[i].text == "-") sign = -sign;
        ++i;
      }
      if (i >= tokens.size()) throw ParseError("dangling sign in LP expression");
      double coef = 1.0;
      bool saw_number = false;
      if (tokens[i].kind == Token::Number) {
        coef = tokens[i].value;
        saw_number = true;
        ++i;
      }
      if (i < tokens.size() && tokens[i].kind == Token::Name) {
        std::string sec2;
        if (saw_number && section_at(tokens, i, &sec2)) {
          *constant += sign * coef;  // number right before the next section
          break;
        }
        (*terms)[var_id(tokens[i].text)] += sign * coef;
        ++i;
      } else if (saw_number) {
        *constant += sign * coef;
      } else {
        throw ParseError("expected number or name in LP expression near token " +
                         std::to_string(i));
      }
    }
  };

  // Objective.
  {
    if (i < tokens.size() && tokens[i].kind == Token::Name && i + 1 < tokens.size() &&
        tokens[i + 1].kind == Token::Colon) {
      i += 2;  // skip "obj:"
    }
    std::map<int, double> terms;
    double constant = 0.0;
    parse_expr(&terms, &constant);
    ObjectiveGroup g;
    g.name = "imported";
    g.weight = 1.0;
    g.constant = constant;
    for (const auto& [var, coef] : terms) g.terms.push_back({var, coef});
    model.objective.push_back(std::move(g));
  }

  if (!section_at(tokens, i, &section) || section != "subject to") {
    throw ParseError("expected Subject To after the objective");
  }
  i += section == "subject to" && lower(tokens[i].text) == "subject" ? 2 : 1;

  // Rows.
  while (i < tokens.size()) {
    std::string sec;
    if (section_at(tokens, i, &sec)) break;
    Row row;
    if (tokens[i].kind == Token::Name && i + 1 < tokens.size() &&
        tokens[i + 1].kind == Token::Colon) {
      row.name = tokens[i].text;
      i += 2;
    } else {
      row.name = "c" + std::to_string(model.rows.size());
    }
    std::map<int, double> terms;
    double constant = 0.0;
    parse_expr(&terms, &constant);
    if (i >= tokens.size() || tokens[i].kind != Token::Sense) {
      throw ParseError("row " + row.name + ": expected <=, >= or =");
    }
    std::string sense = tokens[i].text;
    ++i;
    double sign = 1.0;
    while (i < tokens.size() && tokens[i].kind == Token::Sign) {
      if (tokens[i].text == "-") sign = -sign;
      ++i;
    }
    if (i >= tokens.size() || tokens[i].kind != Token::Number) {
      throw ParseError("row " + row.name + ": expected numeric right-hand side");
    }
    double rhs = sign * tokens[i].value - constant;
    ++i;
    row.sense = sense == "<=" ? RowSense::LE : sense == ">=" ? RowSense::GE : RowSense::EQ;
    row.rhs = rhs;
    for (const auto& [var, coef] : terms) {
      if (coef != 0.0) row.terms.push_back({var, coef});
    }
    model.rows.push_back(std::move(row));
  }

  // Bounds / Generals / Binaries / End in any order.
  while (i < tokens.size()) {
    std::string sec;
    if (!section_at(tokens, i, &sec)) {
      throw ParseError("unexpected token '" + tokens[i].text + "' after constraint rows");
    }
    ++i;
    if (sec == "end") break;
    if (sec == "bounds") {
      while (i < tokens.size()) {
        std::string nested;
        if (section_at(tokens, i, &nested)) break;
        // forms: lo <= name <= hi | name <= hi | name >= lo | name = v | name free
        double first_num = 0.0;
        bool have_first = false;
        double sign = 1.0;
        while (i < tokens.size() && tokens[i].kind == Token::Sign) {
          if (tokens[i].text == "-") sign = -sign;
          ++i;
        }
        if (i < tokens.size() && tokens[i].kind == Token::Number) {
          first_num = sign * tokens[i].value;
          have_first = true;
          ++i;
          if (i >= tokens.size() || tokens[i].kind != Token::Sense || tokens[i].text != "<=") {
            throw ParseError("bounds: expected <= after number");
          }
          ++i;
        }
        if (i >= tokens.size() || tokens[i].kind != Token::Name) {
          throw ParseError("bounds: expected variable name");
        }
        int var = var_id(tokens[i].text);
        ++i;
        if (have_first) model.variables[var].lo = first_num;
        if (i < tokens.size() && tokens[i].kind == Token::Name &&
            lower(tokens[i].text) == "free") {
          model.variables[var].lo = -kInf;
          model.variables[var].hi = kInf;
          ++i;
          continue;
        }
        if (i < tokens.size() && tokens[i].kind == Token::Sense) {
          std::string s = tokens[i].text;
          ++i;
          double vsign = 1.0;
          while (i < tokens.size() && tokens[i].kind == Token::Sign) {
            if (tokens[i].text == "-") vsign = -vsign;
            ++i;
          }
          if (i >= tokens.size() || tokens[i].kind != Token::Number) {
            throw ParseError("bounds: expected number after " + s);
          }
          double v = vsign * tokens[i].value;
          ++i;
          if (s == "<=") model.variables[var].hi = v;
          else if (s == ">=") model.variables[var].lo = v;
          else { model.variables[var].lo = v; model.variables[var].hi = v; }
        } else if (!have_first) {
          throw ParseError("bounds: expected a relation for " + model.variables[var].name);
        }
      }
    } else if (sec == "generals" || sec == "general" || sec == "binaries" || sec == "binary") {
      bool binary = sec[0] == 'b';
      while (i < tokens.size()) {
        std::string nested;
        if (section_at(tokens, i, &nested)) break;
        if (tokens[i].kind != Token::Name) {
          throw ParseError("expected variable name in " + sec + " section");
        }
        VarDef& v = model.variables[var_id(tokens[i].text)];
        if (binary) {
          v.kind = VarKind::Binary;
          v.lo = 0.0;
          v.hi = 1.0;
        } else {
          v.kind = VarKind::Integer;
        }
        ++i;
      }
    }
  }

  model.refresh_metadata_counts();
  return model;
}

Solution parse_solution_text(const std::string& text, const MilpModel& model) {
  Solution sol;
  bool have_status = false;
  bool have_bound = false;
  std::map<std::string, double> raw;

  std::istringstream in(text);
  std::string line;
  bool highs_native = text.find("Model status") != std::string::npos;

  if (highs_native) {
    bool expect_status = false;
    long long columns_left = -1;
    while (std::getline(in, line)) {
      if (line == "Model status") {
        expect_status = true;
        continue;
      }
      if (expect_status && !line.empty()) {
        std::string s = lower(line);
        if (s.find("optimal") != std::string::npos) sol.status = SolveStatus::Optimal;
        else if (s.find("infeasible") != std::string::npos) sol.status = SolveStatus::Infeasible;
        else if (s.find("time") != std::string::npos) sol.status = SolveStatus::TimeLimit;
        else sol.status = SolveStatus::Feasible;
        have_status = true;
        expect_status = false;
        continue;
      }
      if (line.rfind("# Columns", 0) == 0) {
        columns_left = std::stoll(line.substr(9));
        continue;
      }
      if (line.rfind("# Rows", 0) == 0) break;  // duals and basis follow
      if (columns_left > 0) {
        std::istringstream ls(line);
        std::string name;
        double value;
        if (ls >> name >> value) raw[name] = value;
        --columns_left;
      }
    }
  } else {
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string head;
      ls >> head;
      if (head == "=status=") {
        std::string s;
        ls >> s;
        sol.status = solve_status_from_string(s);
        have_status = true;
      } else if (head == "=bound=") {
        ls >> sol.bound;
        have_bound = true;
      } else {
        double value;
        if (!(ls >> value)) {
          throw ParseError("solution line without a numeric value: " + line);
        }
        raw[head] = value;
      }
    }
  }

  if (!have_status) throw ParseError("solution text carries no solver status");
  if (sol.status == SolveStatus::Infeasible) return sol;
  if (raw.empty()) {
    if (sol.status == SolveStatus::TimeLimit) return sol;  // no incumbent
    throw ParseError("solver reported " + to_string(sol.status) +
                     " but returned no variable values");
  }

  std::vector<double> values(model.variables.size(), 0.0);
  for (size_t v = 0; v < model.variables.size(); ++v) {
    auto it = raw.find(model.variables[v].name);
    double x = it == raw.end() ? 0.0 : it->second;
    if (model.variables[v].kind != VarKind::Continuous) {
      double snapped = std::round(x);
      if (std::abs(x - snapped) <= 1e-4) x = snapped;
    }
    values[v] = x;
    sol.values[model.variables[v].name] = x;
  }
  sol.objective = model.eval_objective(values);
  if (!have_bound) {
    sol.bound = sol.status == SolveStatus::Optimal
                    ? sol.objective
                    : -std::numeric_limits<double>::infinity();
  }
  return sol;
}

}  // namespace gridplan
