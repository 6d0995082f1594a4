#include "nrlat/grid.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

#include "nrlat/errors.hpp"

namespace nrlat {

namespace {

std::vector<int> admissible_starts(const NumerologyProfile& numerology, SlotType slot_type, Direction direction,
                                   const ControlConfig& control)
{
    std::vector<int> starts;
    if (slot_type == SlotType::Full) {
        starts.push_back(data_region(numerology, direction, control).first);
        return starts;
    }
    const int len = transmission_symbols(slot_type, numerology.symbols_per_slot());
    for (int s = 0; s + len <= numerology.symbols_per_slot(); ++s) starts.push_back(s);
    return starts;
}

Tick next_start_from(Tick ready, const NumerologyProfile& numerology, const std::vector<int>& starts)
{
    const std::int64_t slot = numerology.slot_of(ready);
    for (int s : starts) {
        const Tick t = numerology.symbol_start(slot, s);
        if (t >= ready) return t;
    }
    return numerology.symbol_start(slot + 1, starts.front());
}

// Widest zero run in the first `limit` bits.
int widest_zero_run(const std::uint64_t* mask, int limit)
{
    int best = 0;
    int run = 0;
    for (int b = 0; b < limit; ++b) {
        if ((mask[b >> 6] >> (b & 63)) & 1u) {
            run = 0;
        } else {
            best = std::max(best, ++run);
        }
    }
    return best;
}

}  // namespace

Tick next_transmission_start(Tick ready, const NumerologyProfile& numerology, SlotType slot_type, Direction direction,
                             const ControlConfig& control)
{
    return next_start_from(ready, numerology, admissible_starts(numerology, slot_type, direction, control));
}

Tick frame_alignment(Tick ready, const NumerologyProfile& numerology, SlotType slot_type, Direction direction,
                     const ControlConfig& control)
{
    return next_transmission_start(ready, numerology, slot_type, direction, control) - ready;
}

SlotGrid::SlotGrid(const NumerologyProfile& numerology, Direction direction, int n_rb_total,
                   const ControlConfig& control, SlotType slot_type)
    : numerology_(numerology), direction_(direction), slot_type_(slot_type), control_(control),
      n_rb_total_(n_rb_total), nsym_(numerology.symbols_per_slot()), words_(simd::padded_words(n_rb_total)),
      kernels_(&simd::active_kernels())
{
    if (n_rb_total <= 0) throw ConfigError("grid needs at least one RB");
    control.validate(numerology, n_rb_total);
    const SymbolRange region = data_region(numerology, direction, control);
    tx_symbols_ = slot_type == SlotType::Full ? region.count : nrlat::transmission_symbols(slot_type, nsym_);
    starts_ = admissible_starts(numerology, slot_type, direction, control);

    const bool dl = direction == Direction::Downlink;
    const int ctrl_rb = dl ? control.n_rb_pdcch : control.n_rb_pucch;
    template_.assign(words_ * nsym_, 0);
    ctrl_rbs_.assign(nsym_, 0);
    capacity_.assign(nsym_, 0);
    for (int s = 0; s < nsym_; ++s) {
        Word* row = template_.data() + s * words_;
        // Padding bits beyond the carrier are permanently occupied.
        const int pad = static_cast<int>(words_ * 64) - n_rb_total;
        if (pad > 0) simd::set_bits(row, n_rb_total, pad);
        const bool in_region = s >= region.first && s <= region.last();
        if (!in_region) {
            ctrl_rbs_[s] = ctrl_rb;
            simd::set_bits(row, n_rb_total - ctrl_rb, ctrl_rb);
        }
        if (slot_type == SlotType::Full) {
            capacity_[s] = in_region ? n_rb_total : 0;
        } else {
            capacity_[s] = n_rb_total - ctrl_rbs_[s];
        }
    }
    std::vector<Word> mask(words_);
    for (int s : starts_) {
        std::fill(mask.begin(), mask.end(), 0);
        for (int q = s; q < s + tx_symbols_; ++q) {
            kernels_->or_accumulate(mask.data(), template_.data() + q * words_, words_);
        }
        max_rbs_ = std::max(max_rbs_, widest_zero_run(mask.data(), n_rb_total));
    }
}

Tick SlotGrid::next_start(Tick ready) const { return next_start_from(ready, numerology_, starts_); }

const SlotGrid::Word* SlotGrid::rows(std::int64_t slot) const
{
    const std::int64_t i = slot - base_slot_;
    if (i < 0) throw std::logic_error("grid access to expired slot " + std::to_string(slot));
    if (i >= static_cast<std::int64_t>(slots_.size())) return template_.data();
    return slots_[static_cast<std::size_t>(i)].data();
}

SlotGrid::Word* SlotGrid::rows_mut(std::int64_t slot)
{
    const std::int64_t i = slot - base_slot_;
    if (i < 0) throw std::logic_error("grid write to expired slot " + std::to_string(slot));
    while (static_cast<std::int64_t>(slots_.size()) <= i) slots_.push_back(template_);
    return slots_[static_cast<std::size_t>(i)].data();
}

int SlotGrid::control_rbs(int symbol) const { return ctrl_rbs_[symbol]; }

int SlotGrid::capacity_rbs(int symbol) const { return capacity_[symbol]; }

int SlotGrid::used(std::int64_t slot, int symbol) const
{
    const std::size_t i = static_cast<std::size_t>(slot) * nsym_ + symbol;
    return i < used_.size() ? used_[i] : 0;
}

void SlotGrid::add_used(std::int64_t slot, int symbol, int delta)
{
    const std::size_t i = static_cast<std::size_t>(slot) * nsym_ + symbol;
    if (i >= used_.size()) used_.resize(std::max(i + 1, used_.size() * 2), 0);
    used_[i] = static_cast<std::uint16_t>(used_[i] + delta);
}

bool SlotGrid::fits_counts(std::int64_t slot, int first_symbol, int n_rb) const
{
    for (int q = first_symbol; q < first_symbol + tx_symbols_; ++q) {
        if (n_rb_total_ - ctrl_rbs_[q] - used(slot, q) < n_rb) return false;
    }
    return true;
}

std::optional<Placement> SlotGrid::find(int n_rb, Tick earliest, int repetitions, Tick latest_start) const
{
    if (n_rb < 1 || n_rb > max_rbs_) {
        throw InfeasibleAllocation(std::to_string(n_rb) + " RBs x " + std::to_string(tx_symbols_) +
                                   " symbols exceed the " + std::to_string(max_rbs_) + " RBs available per " +
                                   to_string(slot_type_) + " " + to_string(direction_) + " transmission");
    }
    if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    if (earliest < 0) earliest = 0;

    std::vector<Word> mask(words_);
    for (std::int64_t slot = numerology_.slot_of(earliest);; ++slot) {
        for (int s : starts_) {
            const Tick t = numerology_.symbol_start(slot, s);
            if (t < earliest) continue;
            if (t > latest_start) return std::nullopt;
            bool room = true;
            for (int r = 0; r < repetitions && room; ++r) room = fits_counts(slot + r, s, n_rb);
            if (!room) continue;

            std::fill(mask.begin(), mask.end(), 0);
            for (int r = 0; r < repetitions; ++r) {
                const Word* base = rows(slot + r);
                for (int q = s; q < s + tx_symbols_; ++q) kernels_->or_accumulate(mask.data(), base + q * words_, words_);
            }
            const int rb = simd::find_zero_run(mask.data(), n_rb_total_, n_rb);
            if (rb < 0) continue;

            Placement p;
            p.slot = slot;
            p.first_symbol = s;
            p.n_symbols = tx_symbols_;
            p.first_rb = rb;
            p.n_rb = n_rb;
            p.repetitions = repetitions;
            p.start = t;
            p.first_end = numerology_.symbol_start(slot, s + tx_symbols_);
            p.end = numerology_.symbol_start(slot + repetitions - 1, s + tx_symbols_);
            return p;
        }
    }
}

void SlotGrid::commit(std::uint64_t owner, const Placement& p)
{
    std::vector<Word> rect(words_);
    simd::range_mask(rect.data(), words_, p.first_rb, p.n_rb);
    for (int r = 0; r < p.repetitions; ++r) {
        const Word* cur = rows(p.slot + r);
        for (int q = p.first_symbol; q < p.first_symbol + p.n_symbols; ++q) {
            if (kernels_->intersects(cur + q * words_, rect.data(), words_)) {
                throw std::logic_error("overlapping reservation in slot " + std::to_string(p.slot + r));
            }
        }
    }
    for (int r = 0; r < p.repetitions; ++r) {
        Word* cur = rows_mut(p.slot + r);
        for (int q = p.first_symbol; q < p.first_symbol + p.n_symbols; ++q) {
            kernels_->or_accumulate(cur + q * words_, rect.data(), words_);
            add_used(p.slot + r, q, p.n_rb);
        }
    }
    if (ledger_on_) ledger_.push_back({owner, p, false});
}

Allocation SlotGrid::allocate(std::uint64_t owner, int n_rb, Tick ready, int repetitions)
{
    Allocation a;
    const Tick boundary = next_start(ready);
    a.placement = *find(n_rb, ready, repetitions);
    a.t_fa = boundary - ready;
    a.t_w = a.placement.start - boundary;
    commit(owner, a.placement);
    return a;
}

void SlotGrid::release(const Placement& p)
{
    for (int r = 0; r < p.repetitions; ++r) {
        Word* cur = rows_mut(p.slot + r);
        for (int q = p.first_symbol; q < p.first_symbol + p.n_symbols; ++q) {
            simd::clear_bits(cur + q * words_, p.first_rb, p.n_rb);
            add_used(p.slot + r, q, -p.n_rb);
        }
    }
    if (ledger_on_) {
        for (auto it = ledger_.rbegin(); it != ledger_.rend(); ++it) {
            if (!it->released && it->placement == p) {
                it->released = true;
                break;
            }
        }
    }
}

std::size_t SlotGrid::release_expired(Tick now)
{
    // Slot k ends at (k+1)*slot_ticks; every slot below `first_live` has ended.
    const std::int64_t first_live = floor_div(now, numerology_.slot_ticks());
    std::size_t freed = 0;
    while (base_slot_ < first_live) {
        if (!slots_.empty()) {
            slots_.pop_front();
            ++freed;
        }
        ++base_slot_;
        if (slots_.empty()) {
            base_slot_ = std::max(base_slot_, first_live);
            break;
        }
    }
    return freed;
}

std::pair<std::int64_t, std::int64_t> SlotGrid::utilization_terms(Tick from, Tick to) const
{
    std::int64_t num = 0;
    std::int64_t den = 0;
    if (to <= from) return {0, 0};
    const Tick sym = numerology_.symbol_ticks();
    for (std::int64_t slot = std::max<std::int64_t>(0, numerology_.slot_of(from)); slot <= numerology_.slot_of(to - 1);
         ++slot) {
        for (int q = 0; q < nsym_; ++q) {
            const Tick a = numerology_.symbol_start(slot, q);
            const Tick ov = std::min(to, a + sym) - std::max(from, a);
            if (ov <= 0) continue;
            num += static_cast<std::int64_t>(used(slot, q)) * ov;
            den += static_cast<std::int64_t>(capacity_[q]) * ov;
        }
    }
    return {num, den};
}

double SlotGrid::utilization(Tick from, Tick to) const
{
    auto [num, den] = utilization_terms(from, to);
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

int SlotGrid::occupied_rbs(std::int64_t slot, int symbol) const
{
    const Word* row = rows(slot) + symbol * words_;
    const int pad = static_cast<int>(words_ * 64) - n_rb_total_;
    return static_cast<int>(kernels_->popcount(row, words_)) - pad;
}

bool SlotGrid::is_free(std::int64_t slot, int symbol, int rb) const
{
    const Word* row = rows(slot) + symbol * words_;
    return ((row[rb >> 6] >> (rb & 63)) & 1u) == 0;
}

void SlotGrid::write_trace_csv(std::ostream& os) const
{
    os << "owner,slot,first_rb,n_rb,first_symbol,n_symbols,repetitions,released\n";
    for (const auto& r : ledger_) {
        const auto& p = r.placement;
        os << r.owner << ',' << p.slot << ',' << p.first_rb << ',' << p.n_rb << ',' << p.first_symbol << ','
           << p.n_symbols << ',' << p.repetitions << ',' << (r.released ? 1 : 0) << '\n';
    }
}

}  // namespace nrlat
