#include "cantor/martingale.hpp"

#include <algorithm>
#include <set>

namespace cantor {

std::unique_ptr<MartCursor> Martingale::cursor() const {
  if (!p_) fail(Err::precondition_violated, "empty martingale");
  return p_->cursor();
}

Dyadic Martingale::at(const Bits& x) const {
  auto c = cursor();
  for (size_t i = 0; i < x.size(); ++i) c->push(x.bit(i));
  return c->value();
}

Dyadic Martingale::initial() const { return cursor()->value(); }

// --- table ---------------------------------------------------------------

namespace {

class TableImpl;

// Effective value: deepest listed prefix. Children missing from the table
// inherit the parent value, which keeps unlisted subtrees fair automatically.
class TableCursor final : public MartCursor {
public:
  TableCursor(const std::map<Bits, Dyadic>& table, Dyadic root) : table_(table) {
    vals_.push_back(std::move(root));
  }
  const Dyadic& value() const override { return vals_.back(); }
  size_t depth() const override { return path_.size(); }
  Dyadic peek(int bit) override { return child_value(bit); }
  void push(int bit) override {
    vals_.push_back(child_value(bit));
    path_.push_back(bit);
  }
  void pop() override {
    vals_.pop_back();
    path_.pop_back();
  }

private:
  Dyadic child_value(int bit) const {
    auto it = table_.find(path_.child(bit));
    return it == table_.end() ? vals_.back() : it->second;
  }
  const std::map<Bits, Dyadic>& table_;
  Bits path_;
  std::vector<Dyadic> vals_;
};

class TableImpl final : public MartingaleImpl {
public:
  explicit TableImpl(std::map<Bits, Dyadic> table) : table_(std::move(table)) {}
  std::unique_ptr<MartCursor> cursor() const override {
    return std::make_unique<TableCursor>(table_, table_.at(Bits()));
  }
  const char* tag() const override { return "table"; }
  const std::map<Bits, Dyadic>& table() const { return table_; }

private:
  std::map<Bits, Dyadic> table_;
};

Dyadic effective_table_value(const std::map<Bits, Dyadic>& table, const Bits& x) {
  // Deepest listed prefix of x; the root is always listed.
  for (size_t keep = x.size();; --keep) {
    auto it = table.find(x.prefix(keep));
    if (it != table.end()) return it->second;
    if (keep == 0) break;
  }
  fail(Err::precondition_violated, "table martingale lost its root");
}

}  // namespace

Martingale table_martingale(std::map<Bits, Dyadic> values) {
  if (!values.count(Bits())) fail(Err::malformed_input, "table martingale needs a root value");
  for (const auto& [x, v] : values)
    if (v.sign() < 0) fail(Err::malformed_input, "table martingale is negative at '" + x.str() + "'");
  // Fairness on the skeleton: a node with only inherited children is fair
  // automatically, so checking every proper prefix of a listed key suffices.
  std::map<Bits, Dyadic> table = std::move(values);
  std::set<Bits> internal;
  for (const auto& [key, unused] : table) {
    (void)unused;
    for (size_t len = 0; len < key.size(); ++len) internal.insert(key.prefix(len));
  }
  for (const Bits& node : internal) {
    Dyadic v = effective_table_value(table, node);
    auto pick = [&](int b) {
      auto it = table.find(node.child(b));
      return it == table.end() ? v : it->second;
    };
    Dyadic c0 = pick(0);
    Dyadic c1 = pick(1);
    if (c0 + c1 != v + v)
      fail(Err::malformed_input, "table martingale is unfair at '" + node.str() + "'");
  }
  return Martingale(std::make_shared<TableImpl>(std::move(table)));
}

Martingale table_martingale_unchecked(std::map<Bits, Dyadic> values) {
  if (!values.count(Bits())) fail(Err::malformed_input, "table martingale needs a root value");
  return Martingale(std::make_shared<TableImpl>(std::move(values)));
}

Martingale constant_martingale(const Dyadic& c) {
  std::map<Bits, Dyadic> t;
  t[Bits()] = c;
  return table_martingale(std::move(t));
}

// --- conditional measure ---------------------------------------------------

namespace {

class ConditionalImpl;

class ConditionalCursor final : public MartCursor {
public:
  explicit ConditionalCursor(const std::vector<Bits>& gens) : gens_(gens) {
    Frame root;
    root.contained = false;
    Dyadic v = 0;
    for (uint32_t i = 0; i < gens_.size(); ++i) {
      if (gens_[i].empty()) {
        root.contained = true;
      } else {
        root.active.push_back(i);
        v += Dyadic::pow2(-static_cast<int64_t>(gens_[i].size()));
      }
    }
    if (root.contained) v = 1;
    root.val = v;
    stack_.push_back(std::move(root));
  }

  const Dyadic& value() const override { return stack_.back().val; }
  size_t depth() const override { return stack_.size() - 1; }

  Dyadic peek(int bit) override {
    Frame f = make_child(bit);
    return f.val;
  }
  void push(int bit) override { stack_.push_back(make_child(bit)); }
  void pop() override { stack_.pop_back(); }

private:
  struct Frame {
    Dyadic val;
    bool contained = false;
    std::vector<uint32_t> active;  // generators properly extending the path
  };

  Frame make_child(int bit) const {
    const Frame& top = stack_.back();
    size_t d = stack_.size() - 1;
    Frame child;
    if (top.contained) {
      child.contained = true;
      child.val = 1;
      return child;
    }
    Dyadic v = 0;
    for (uint32_t i : top.active) {
      const Bits& g = gens_[i];
      if (g.bit(d) != bit) continue;
      if (g.size() == d + 1) {
        child.contained = true;  // antichain: nothing else can extend this node
      } else {
        child.active.push_back(i);
        v += Dyadic::pow2(-static_cast<int64_t>(g.size() - d - 1));
      }
    }
    child.val = child.contained ? Dyadic(1) : v;
    if (child.contained) child.active.clear();
    return child;
  }

  const std::vector<Bits>& gens_;
  std::vector<Frame> stack_;
};

class ConditionalImpl final : public MartingaleImpl {
public:
  explicit ConditionalImpl(ClopenSet reduced) : set_(std::move(reduced)) {}
  std::unique_ptr<MartCursor> cursor() const override {
    return std::make_unique<ConditionalCursor>(set_.generators);
  }
  const char* tag() const override { return "conditional"; }
  const ClopenSet& set() const { return set_; }

private:
  ClopenSet set_;
};

}  // namespace

Martingale conditional_martingale(const ClopenSet& a) {
  return Martingale(std::make_shared<ConditionalImpl>(reduce(a)));
}

// --- law-of-large-numbers bettor --------------------------------------------

namespace {

class LlnImpl;

class LlnCursor final : public MartCursor {
public:
  LlnCursor(Dyadic up, Dyadic down) : up_(std::move(up)), down_(std::move(down)) {
    vals_.push_back(Dyadic(1));
  }
  const Dyadic& value() const override { return vals_.back(); }
  size_t depth() const override { return vals_.size() - 1; }
  Dyadic peek(int bit) override { return vals_.back() * (bit ? up_ : down_); }
  void push(int bit) override { vals_.push_back(peek(bit)); }
  void pop() override { vals_.pop_back(); }

private:
  Dyadic up_, down_;
  std::vector<Dyadic> vals_;
};

class LlnImpl final : public MartingaleImpl {
public:
  explicit LlnImpl(Dyadic q) : q_(std::move(q)) {}
  std::unique_ptr<MartCursor> cursor() const override {
    return std::make_unique<LlnCursor>(Dyadic(1) + q_, Dyadic(1) - q_);
  }
  const char* tag() const override { return "lln"; }
  const Dyadic& q() const { return q_; }

private:
  Dyadic q_;
};

}  // namespace

Martingale lln_martingale(const Dyadic& q) {
  if (!(Dyadic(0) < q && q < Dyadic(1)))
    fail(Err::malformed_input, "bias q must lie strictly between 0 and 1");
  return Martingale(std::make_shared<LlnImpl>(q));
}

// --- linear combinations -----------------------------------------------------

namespace {

class LinCombImpl;

class LinCombCursor final : public MartCursor {
public:
  LinCombCursor(const std::vector<std::pair<Dyadic, Martingale>>& terms, const char*) {
    for (const auto& [w, d] : terms) {
      weights_.push_back(w);
      comps_.push_back(d.cursor());
    }
    vals_.push_back(combine());
  }
  const Dyadic& value() const override { return vals_.back(); }
  size_t depth() const override { return vals_.size() - 1; }
  Dyadic peek(int bit) override {
    Dyadic v = 0;
    for (size_t i = 0; i < comps_.size(); ++i) v += weights_[i] * comps_[i]->peek(bit);
    return v;
  }
  void push(int bit) override {
    for (auto& c : comps_) c->push(bit);
    vals_.push_back(combine());
  }
  void pop() override {
    for (auto& c : comps_) c->pop();
    vals_.pop_back();
  }

private:
  Dyadic combine() const {
    Dyadic v = 0;
    for (size_t i = 0; i < comps_.size(); ++i) v += weights_[i] * comps_[i]->value();
    return v;
  }
  std::vector<Dyadic> weights_;
  std::vector<std::unique_ptr<MartCursor>> comps_;
  std::vector<Dyadic> vals_;
};

class LinCombImpl final : public MartingaleImpl {
public:
  LinCombImpl(std::vector<std::pair<Dyadic, Martingale>> terms, const char* tag,
              std::vector<Martingale> battery = {})
      : terms_(std::move(terms)), tag_(tag), battery_(std::move(battery)) {}
  std::unique_ptr<MartCursor> cursor() const override {
    return std::make_unique<LinCombCursor>(terms_, tag_);
  }
  const char* tag() const override { return tag_; }
  const std::vector<Martingale>& battery() const { return battery_; }

private:
  std::vector<std::pair<Dyadic, Martingale>> terms_;
  const char* tag_;
  std::vector<Martingale> battery_;
};

}  // namespace

Martingale weighted_sum(const std::vector<Martingale>& battery) {
  std::vector<std::pair<Dyadic, Martingale>> terms;
  for (size_t e = 0; e < battery.size(); ++e) {
    if (!battery[e]) fail(Err::precondition_violated, "empty martingale in battery");
    if (battery[e].initial() > Dyadic(1))
      fail(Err::malformed_input, "battery entry " + std::to_string(e) + " starts above 1");
    terms.emplace_back(Dyadic::pow2(-static_cast<int64_t>(e)), battery[e]);
  }
  return Martingale(std::make_shared<LinCombImpl>(std::move(terms), "weighted_sum", battery));
}

Martingale lin_comb(std::vector<std::pair<Dyadic, Martingale>> terms) {
  for (const auto& [w, d] : terms) {
    if (w.sign() < 0) fail(Err::malformed_input, "combination weight is negative");
    if (!d) fail(Err::precondition_violated, "empty martingale in combination");
  }
  return Martingale(std::make_shared<LinCombImpl>(std::move(terms), "combination"));
}

// --- checks ------------------------------------------------------------------

FairnessResult check_fairness(const Martingale& d, int64_t depth) {
  auto c = d.cursor();
  FairnessResult res;
  Bits path;
  auto visit = [&](auto&& self) -> bool {
    if (c->value().sign() < 0) {
      res = {false, path};
      return false;
    }
    if (static_cast<int64_t>(path.size()) >= depth) return true;
    Dyadic v = c->value();
    Dyadic c0 = c->peek(0);
    Dyadic c1 = c->peek(1);
    if (c0 + c1 != v + v) {
      res = {false, path};
      return false;
    }
    for (int b = 0; b < 2; ++b) {
      c->push(b);
      path.push_back(b);
      bool ok = self(self);
      path.pop_back();
      c->pop();
      if (!ok) return false;
    }
    return true;
  };
  visit(visit);
  return res;
}

ClopenSet threshold_hitting_set(const Martingale& d, int64_t k, int64_t maxlen) {
  auto c = d.cursor();
  ClopenSet out;
  out.prefix_free = true;
  Bits path;
  auto visit = [&](auto&& self) -> void {
    if (c->value().geq_pow2(k)) {
      out.generators.push_back(path);  // minimal: do not descend past a hit
      return;
    }
    if (static_cast<int64_t>(path.size()) >= maxlen) return;
    for (int b = 0; b < 2; ++b) {
      c->push(b);
      path.push_back(b);
      self(self);
      path.pop_back();
      c->pop();
    }
  };
  visit(visit);
  std::sort(out.generators.begin(), out.generators.end());
  return out;
}

SuccessReport success_report(const Martingale& d, const OrderFn& h, const SequenceSource& xi,
                             int64_t horizon) {
  if (horizon < 0) fail(Err::malformed_input, "horizon must be nonnegative");
  SuccessReport rep;
  rep.horizon = horizon;
  auto c = d.cursor();
  std::vector<bool> hit(static_cast<size_t>(horizon) + 1, false);
  for (int64_t i = 0;; ++i) {
    if (c->value().geq_pow2(h(i))) {
      hit[static_cast<size_t>(i)] = true;
      rep.hits.push_back(i);
    }
    if (i == horizon) break;
    c->push(xi.bit(i));
  }
  rep.verdict_io = !rep.hits.empty();
  if (hit[static_cast<size_t>(horizon)]) {
    int64_t t = horizon;
    while (t > 0 && hit[static_cast<size_t>(t - 1)]) --t;
    rep.ae_tail = t;
  }
  return rep;
}

// --- savings transform ---------------------------------------------------------

struct SavingsMartingale::Impl {
  Martingale base;
  OrderFn f;
  int64_t n0 = 0;
};

namespace {

class SavingsCursor final : public SavCursor {
public:
  SavingsCursor(const Martingale& base, const OrderFn& f, int64_t n0)
      : base_(base.cursor()), f_(f), n0_(n0), f_n0_(f(n0)) {
    delta_.push_back(Rational(base_->value()));
    int64_t band = (f_n0_ == 0) ? n0_ : -1;
    band_.push_back(band);
    if (band >= 0) checkpoints_.emplace_back(band, delta_.back());
  }

  const Rational& value() const override { return delta_.back(); }
  size_t depth() const override { return delta_.size() - 1; }

  Rational peek(int bit) override { return child_value(bit); }

  void push(int bit) override {
    Rational child = child_value(bit);
    base_->push(bit);
    delta_.push_back(child);
    int64_t m = static_cast<int64_t>(delta_.size()) - 1;  // new depth
    int64_t band = band_[band_.size() - 1];
    if (band < 0 && m == f_n0_) {
      band = n0_;
      checkpoints_.emplace_back(band, delta_.back());
    } else if (band >= 0 && f_(band + 1) == m) {
      ++band;
      checkpoints_.emplace_back(band, delta_.back());
    }
    band_.push_back(band);
  }

  void pop() override {
    int64_t m = static_cast<int64_t>(delta_.size()) - 1;
    int64_t band = band_.back();
    if (band >= 0 && f_(band) == m) checkpoints_.pop_back();
    band_.pop_back();
    delta_.pop_back();
    base_->pop();
  }

private:
  Rational child_value(int bit) {
    int64_t child_depth = static_cast<int64_t>(delta_.size());
    if (child_depth <= f_n0_) return Rational(base_->peek(bit));
    // Current depth sits in the band of its top checkpoint; bank half of the
    // checkpoint capital and rebet the rest proportionally to the base.
    const Rational& cp = checkpoints_.back().second;
    Dyadic dx = base_->value();
    if (dx.is_zero())
      fail(Err::division_by_zero, "savings transform needs a nonvanishing base martingale");
    Dyadic dxi = base_->peek(bit);
    Rational half = cp / Rational(2);
    return half + (delta_.back() - half) * (Rational(dxi) / Rational(dx));
  }

  std::unique_ptr<MartCursor> base_;
  OrderFn f_;
  int64_t n0_;
  int64_t f_n0_;
  std::vector<Rational> delta_;
  std::vector<int64_t> band_;
  std::vector<std::pair<int64_t, Rational>> checkpoints_;
};

}  // namespace

SavingsMartingale::SavingsMartingale(Martingale base, OrderFn f, int64_t n0) {
  if (!base) fail(Err::precondition_violated, "savings transform needs a base martingale");
  if (!f.flags().strictly_increasing)
    fail(Err::precondition_violated, "savings transform needs a strictly increasing checkpoint order");
  if (n0 < 0) fail(Err::malformed_input, "checkpoint start index must be nonnegative");
  auto impl = std::make_shared<Impl>();
  impl->base = std::move(base);
  impl->f = std::move(f);
  impl->n0 = n0;
  p_ = std::move(impl);
}

std::unique_ptr<SavCursor> SavingsMartingale::cursor() const {
  if (!p_) fail(Err::precondition_violated, "empty savings martingale");
  return std::make_unique<SavingsCursor>(p_->base, p_->f, p_->n0);
}

Rational SavingsMartingale::at(const Bits& x) const {
  auto c = cursor();
  for (size_t i = 0; i < x.size(); ++i) c->push(x.bit(i));
  return c->value();
}

const Martingale& SavingsMartingale::base() const { return p_->base; }
const OrderFn& SavingsMartingale::f() const { return p_->f; }
int64_t SavingsMartingale::n0() const { return p_->n0; }

SavingsMartingale savings_transform(const Martingale& d, const OrderFn& f, int64_t n0) {
  return SavingsMartingale(d, f, n0);
}

FairnessResult check_fairness(const SavingsMartingale& d, int64_t depth) {
  auto c = d.cursor();
  FairnessResult res;
  Bits path;
  auto visit = [&](auto&& self) -> bool {
    if (c->value().sign() < 0) {
      res = {false, path};
      return false;
    }
    if (static_cast<int64_t>(path.size()) >= depth) return true;
    Rational v = c->value();
    Rational c0 = c->peek(0);
    Rational c1 = c->peek(1);
    if (c0 + c1 != v + v) {
      res = {false, path};
      return false;
    }
    for (int b = 0; b < 2; ++b) {
      c->push(b);
      path.push_back(b);
      bool ok = self(self);
      path.pop_back();
      c->pop();
      if (!ok) return false;
    }
    return true;
  };
  visit(visit);
  return res;
}

// --- rounding --------------------------------------------------------------------

Approximable approx_exact(const Martingale& v) {
  Approximable a;
  a.exact = v;
  a.approx = [v](const Bits& x, int64_t) { return v.at(x); };
  return a;
}

Approximable approx_truncated(const Martingale& v) {
  Approximable a;
  a.approx = [v](const Bits& x, int64_t i) { return v.at(x).floor_to(i + 2); };
  return a;
}

Approximable approx_savings(const SavingsMartingale& v) {
  Approximable a;
  a.approx = [v](const Bits& x, int64_t i) { return v.at(x).round_nearest_dyadic(i + 1); };
  return a;
}

namespace {

class RoundedImpl final : public MartingaleImpl {
public:
  RoundedImpl(Approximable v, RoundedBaseKind kind, Martingale bm, SavingsMartingale bs)
      : v_(std::move(v)), kind_(kind), bm_(std::move(bm)), bs_(std::move(bs)) {}
  std::unique_ptr<MartCursor> cursor() const override;
  const char* tag() const override { return "rounded"; }
  RoundedBaseKind base_kind() const { return kind_; }
  const Martingale& base_martingale() const { return bm_; }
  const SavingsMartingale& base_savings() const { return bs_; }
  const Approximable& scheme() const { return v_; }

private:
  Approximable v_;
  RoundedBaseKind kind_;
  Martingale bm_;
  SavingsMartingale bs_;
};

class RoundedCursor final : public MartCursor {
public:
  explicit RoundedCursor(const RoundedImpl& impl) : impl_(impl) {
    switch (impl_.base_kind()) {
      case RoundedBaseKind::exact:
      case RoundedBaseKind::truncated:
        inner_ = impl_.base_martingale().cursor();
        break;
      case RoundedBaseKind::savings:
        sav_ = impl_.base_savings().cursor();
        break;
      case RoundedBaseKind::opaque:
        break;
    }
    // d(eps) = F(eps, 5) + 1/4; the quarter of head room keeps capital positive.
    vals_.push_back(approx_here(5) + Dyadic::from_parts(1, 2));
  }

  const Dyadic& value() const override { return vals_.back(); }
  size_t depth() const override { return path_.size(); }

  Dyadic peek(int bit) override {
    Dyadic g = gap();
    return bit == 0 ? vals_.back() + g : vals_.back() - g;
  }

  void push(int bit) override {
    Dyadic child = peek(bit);
    if (child.sign() < 0)
      fail(Err::precondition_violated, "approximation scheme broke the rounding slack");
    if (inner_) inner_->push(bit);
    if (sav_) sav_->push(bit);
    path_.push_back(bit);
    vals_.push_back(std::move(child));
  }

  void pop() override {
    if (inner_) inner_->pop();
    if (sav_) sav_->pop();
    path_.pop_back();
    vals_.pop_back();
  }

private:
  // F at the current path with precision bits i.
  Dyadic approx_here(int64_t i) {
    switch (impl_.base_kind()) {
      case RoundedBaseKind::exact:
        return inner_->value();
      case RoundedBaseKind::truncated:
        return inner_->value().floor_to(i + 2);
      case RoundedBaseKind::savings:
        return sav_->value().round_nearest_dyadic(i + 1);
      case RoundedBaseKind::opaque:
        return impl_.scheme().approx(path_, i);
    }
    fail(Err::precondition_violated, "unreachable rounding kind");
  }
  Dyadic approx_child0(int64_t i) {
    switch (impl_.base_kind()) {
      case RoundedBaseKind::exact:
        return inner_->peek(0);
      case RoundedBaseKind::truncated:
        return inner_->peek(0).floor_to(i + 2);
      case RoundedBaseKind::savings:
        return sav_->peek(0).round_nearest_dyadic(i + 1);
      case RoundedBaseKind::opaque:
        return impl_.scheme().approx(path_.child(0), i);
    }
    fail(Err::precondition_violated, "unreachable rounding kind");
  }
  // G = F(x0, |x|+5) - F(x, |x|+5); the 0-child gains G, the 1-child loses it.
  Dyadic gap() {
    int64_t i = static_cast<int64_t>(path_.size()) + 5;
    return approx_child0(i) - approx_here(i);
  }

  const RoundedImpl& impl_;
  std::unique_ptr<MartCursor> inner_;
  std::unique_ptr<SavCursor> sav_;
  Bits path_;
  std::vector<Dyadic> vals_;
};

std::unique_ptr<MartCursor> RoundedImpl::cursor() const {
  return std::make_unique<RoundedCursor>(*this);
}

}  // namespace

Martingale round_to_dyadic(const Approximable& v) {
  if (!v.approx) fail(Err::precondition_violated, "rounding needs an approximation scheme");
  RoundedBaseKind kind = v.exact ? RoundedBaseKind::exact : RoundedBaseKind::opaque;
  Martingale bm = v.exact ? *v.exact : Martingale();
  return Martingale(std::make_shared<RoundedImpl>(v, kind, std::move(bm), SavingsMartingale()));
}

Martingale round_to_dyadic(const SavingsMartingale& v) {
  return Martingale(
      std::make_shared<RoundedImpl>(approx_savings(v), RoundedBaseKind::savings, Martingale(), v));
}

Martingale round_truncated(const Martingale& v) {
  return Martingale(std::make_shared<RoundedImpl>(approx_truncated(v), RoundedBaseKind::truncated, v,
                                                  SavingsMartingale()));
}

std::optional<RoundedView> rounded_view(const Martingale& d) {
  auto* impl = dynamic_cast<const RoundedImpl*>(d.impl());
  if (!impl) return std::nullopt;
  RoundedView view;
  view.base_kind = impl->base_kind();
  view.base_martingale = &impl->base_martingale();
  view.base_savings = &impl->base_savings();
  return view;
}

std::optional<WeightedSumView> weighted_sum_view(const Martingale& d) {
  auto* impl = dynamic_cast<const LinCombImpl*>(d.impl());
  if (!impl || std::string(impl->tag()) != "weighted_sum") return std::nullopt;
  return WeightedSumView{&impl->battery()};
}

const std::map<Bits, Dyadic>* table_view(const Martingale& d) {
  auto* impl = dynamic_cast<const TableImpl*>(d.impl());
  return impl ? &impl->table() : nullptr;
}

const ClopenSet* conditional_view(const Martingale& d) {
  auto* impl = dynamic_cast<const ConditionalImpl*>(d.impl());
  return impl ? &impl->set() : nullptr;
}

const Dyadic* lln_view(const Martingale& d) {
  auto* impl = dynamic_cast<const LlnImpl*>(d.impl());
  return impl ? &impl->q() : nullptr;
}

}  // namespace cantor
