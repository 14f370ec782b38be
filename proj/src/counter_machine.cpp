#include "coverlab/counter_machine.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace coverlab {

namespace {

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int parse_counter(const std::string& tok, int line_no) {
  if (tok == "a") return 0;
  if (tok == "b") return 1;
  throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown counter '" + tok +
                              "' (expected a or b)");
}

}  // namespace

Program parse_program(const std::string& text) {
  Program prog;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip(raw);
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = strip(line.substr(0, hash));
    if (line.empty()) continue;
    std::istringstream toks(line);
    std::string op;
    toks >> op;
    Instruction ins{};
    if (op == "inc") {
      std::string c;
      if (!(toks >> c)) throw std::invalid_argument("line " + std::to_string(line_no) + ": inc needs a counter");
      ins.op = Instruction::Op::Inc;
      ins.counter = parse_counter(c, line_no);
    } else if (op == "decj") {
      std::string c;
      long long target;
      if (!(toks >> c >> target))
        throw std::invalid_argument("line " + std::to_string(line_no) + ": decj needs counter and target");
      ins.op = Instruction::Op::DecJ;
      ins.counter = parse_counter(c, line_no);
      if (target < 0) throw std::invalid_argument("line " + std::to_string(line_no) + ": negative target");
      ins.target = static_cast<std::uint32_t>(target);
    } else if (op == "halt") {
      ins.op = Instruction::Op::Halt;
    } else {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown op '" + op + "'");
    }
    std::string extra;
    if (toks >> extra)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": trailing token '" + extra + "'");
    prog.code.push_back(ins);
  }
  for (size_t i = 0; i < prog.code.size(); ++i) {
    const Instruction& ins = prog.code[i];
    if (ins.op == Instruction::Op::DecJ && ins.target >= prog.code.size())
      throw std::invalid_argument("decj target " + std::to_string(ins.target) + " out of range");
  }
  return prog;
}

std::optional<std::uint64_t> run_halting_step(const Program& program, std::uint64_t max_steps) {
  if (program.code.empty()) return 1;  // nothing to run: halted immediately
  MachineState st;
  for (std::uint64_t step = 1; step <= max_steps; ++step) {
    const Instruction& ins = program.code[st.pc];
    switch (ins.op) {
      case Instruction::Op::Inc:
        ++st.counters[ins.counter];
        ++st.pc;
        break;
      case Instruction::Op::DecJ:
        if (st.counters[ins.counter] > 0) {
          --st.counters[ins.counter];
          ++st.pc;
        } else {
          st.pc = ins.target;
        }
        break;
      case Instruction::Op::Halt:
        return step;
    }
    if (st.pc >= program.code.size()) return step;  // fell off the end
  }
  return std::nullopt;
}

bool provably_loops(const Program& program) {
  if (program.code.empty()) return false;  // empty program halts immediately
  // Counters never incremented stay 0 from the empty start, so their decj
  // edges always jump.
  bool incremented[2] = {false, false};
  for (const Instruction& ins : program.code)
    if (ins.op == Instruction::Op::Inc) incremented[ins.counter] = true;

  std::vector<bool> seen(program.code.size(), false);
  std::vector<std::uint32_t> work{0};
  seen[0] = true;
  while (!work.empty()) {
    std::uint32_t pc = work.back();
    work.pop_back();
    const Instruction& ins = program.code[pc];
    if (ins.op == Instruction::Op::Halt) return false;
    std::vector<std::uint32_t> next;
    if (ins.op == Instruction::Op::Inc) {
      next.push_back(pc + 1);
    } else {
      next.push_back(ins.target);
      if (incremented[ins.counter]) next.push_back(pc + 1);
    }
    for (std::uint32_t t : next) {
      if (t >= program.code.size()) return false;  // fall-off halts
      if (!seen[t]) {
        seen[t] = true;
        work.push_back(t);
      }
    }
  }
  return true;  // no halt reachable
}

std::vector<CatalogEntry> parse_catalog(const std::string& text) {
  std::vector<CatalogEntry> entries;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool in_program = false;
  CatalogEntry current;
  std::string body;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip(raw);
    if (!in_program) {
      if (line.empty() || line[0] == '#') continue;
      if (line.rfind("@program", 0) != 0)
        throw std::invalid_argument("catalog line " + std::to_string(line_no) +
                                    ": expected @program header");
      current = CatalogEntry{};
      body.clear();
      std::istringstream toks(line.substr(8));
      std::string tok;
      bool have_index = false, have_truth = false;
      while (toks >> tok) {
        if (tok.rfind("index=", 0) == 0) {
          current.index = std::stoull(tok.substr(6));
          have_index = true;
        } else if (tok.rfind("truth=", 0) == 0) {
          std::string v = tok.substr(6);
          if (v == "loops") {
            current.halts = false;
          } else if (v.rfind("halts:", 0) == 0) {
            current.halts = true;
            current.halt_step = std::stoull(v.substr(6));
          } else {
            throw std::invalid_argument("catalog line " + std::to_string(line_no) +
                                        ": bad truth '" + v + "'");
          }
          have_truth = true;
        } else {
          throw std::invalid_argument("catalog line " + std::to_string(line_no) +
                                      ": unknown attribute '" + tok + "'");
        }
      }
      if (!have_index || !have_truth)
        throw std::invalid_argument("catalog line " + std::to_string(line_no) +
                                    ": @program needs index= and truth=");
      in_program = true;
    } else if (line == "@end") {
      current.program = parse_program(body);
      current.source = body;
      entries.push_back(current);
      in_program = false;
    } else {
      body += raw;
      body += '\n';
    }
  }
  if (in_program) throw std::invalid_argument("catalog: unterminated @program block");
  return entries;
}

std::vector<CatalogEntry> load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open catalog file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_catalog(buf.str());
}

}  // namespace coverlab
