#include "coverlab/registry.hpp"

#include <cctype>
#include <cstdlib>
#include <set>
#include <utility>
#include <vector>

#include "coverlab/counter_machine.hpp"

namespace coverlab {

namespace {

bool parse_u64(const std::string& s, std::uint64_t& out) {
  if (s.empty()) return false;
  out = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    std::uint64_t next = out * 10 + static_cast<std::uint64_t>(c - '0');
    if (next < out) return false;
    out = next;
  }
  return true;
}

}  // namespace

Registry::Registry(std::string catalog_path)
    : m_catalog_path(std::move(catalog_path)), m_cache(std::make_shared<EnumerationCache>()) {}

std::shared_ptr<const HaltingApproximator> Registry::halting() const {
  std::lock_guard<std::mutex> lock(m_mutex);
  if (!m_halting) {
    try {
      m_halting = std::make_shared<const HaltingApproximator>(load_catalog(m_catalog_path));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("halting catalog unusable: ") + e.what());
    }
  }
  return m_halting;
}

TargetSet Registry::resolve_set(const std::string& name) const {
  TargetSet set;
  set.name = name;
  if (name == "even-indices" || name == "decidable:even") {
    auto even = [](std::uint64_t i) { return i % 2 == 0; };
    set.truth = [even](std::uint64_t i) { return even(i) ? 1 : 0; };
    set.approximator = make_decidable_approximator(name, even);
    return set;
  }
  if (name == "odd-indices" || name == "decidable:odd") {
    auto odd = [](std::uint64_t i) { return i % 2 == 1; };
    set.truth = [odd](std::uint64_t i) { return odd(i) ? 1 : 0; };
    set.approximator = make_decidable_approximator(name, odd);
    return set;
  }
  if (name == "halting-catalog") {
    auto h = halting();
    set.truth = [h](std::uint64_t i) {
      const CatalogEntry* e = h->entry(i);
      return (e != nullptr && e->halts) ? 1 : 0;
    };
    set.approximator = h;
    return set;
  }
  if (name.rfind("indices:", 0) == 0) {
    auto members = std::make_shared<std::set<std::uint64_t>>();
    std::string body = name.substr(8);
    std::string item;
    auto flush = [&]() {
      if (item.empty()) throw ConfigError("empty entry in index list: " + name);
      std::uint64_t i = 0;
      if (!parse_u64(item, i) || i == 0)
        throw ConfigError("bad index '" + item + "' in set name: " + name);
      members->insert(i);
      item.clear();
    };
    for (char c : body) {
      if (c == ';' || c == ',')
        flush();
      else
        item.push_back(c);
    }
    flush();
    auto contains = [members](std::uint64_t i) { return members->count(i) != 0; };
    set.truth = [contains](std::uint64_t i) { return contains(i) ? 1 : 0; };
    // canonical semicolon-separated spelling (CSV-safe)
    std::string canon = "indices:";
    for (std::uint64_t i : *members) {
      if (canon.size() > 8) canon.push_back(';');
      canon += std::to_string(i);
    }
    set.name = canon;
    set.approximator = make_decidable_approximator(canon, contains);
    return set;
  }
  throw ConfigError("unknown set name: " + name);
}

std::shared_ptr<const CauchyPresentation> Registry::resolve_presentation(
    const std::string& name) const {
  if (name == "e") return make_e_presentation();
  if (name == "general-demo") {
    std::vector<std::shared_ptr<CauchyPresentation>> members;
    members.push_back(make_sqrt_presentation(2));
    members.push_back(make_sqrt_presentation(3));
    members.push_back(make_rational_presentation(Rational(3, 2)));
    members.push_back(make_sqrt_presentation(5));
    members.push_back(make_e_presentation());
    return make_list_presentation("general-demo", std::move(members));
  }
  if (name.rfind("sqrt", 0) == 0) {
    std::string body = name.substr(4);
    std::string d_part = body, k_part;
    auto slash = body.find('/');
    if (slash != std::string::npos) {
      d_part = body.substr(0, slash);
      k_part = body.substr(slash + 1);
    }
    std::uint64_t d = 0, k = 1;
    if (!parse_u64(d_part, d) || d == 0)
      throw ConfigError("bad radicand in presentation name: " + name);
    if (!k_part.empty() && (!parse_u64(k_part, k) || k == 0))
      throw ConfigError("bad divisor in presentation name: " + name);
    return make_sqrt_presentation(d, k);
  }
  if (name.rfind("rational:", 0) == 0) {
    try {
      return make_rational_presentation(parse_rational(name.substr(9)));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("bad rational presentation '") + name + "': " + e.what());
    }
  }
  throw ConfigError("unknown presentation name: " + name);
}

}  // namespace coverlab
