#include "gridplan/basis_factor.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace gridplan {

namespace {

/// Doubly linked bucket lists keyed by nonzero count.
class CountBuckets {
public:
    explicit CountBuckets(int n) : head_(static_cast<std::size_t>(n) + 2, -1), next_(n, -1), prev_(n, -1), key_(n, -1) {}

    void insert(int item, int count) {
        const auto c = static_cast<std::size_t>(count);
        key_[item] = count;
        prev_[item] = -1;
        next_[item] = head_[c];
        if (head_[c] >= 0) prev_[head_[c]] = item;
        head_[c] = item;
    }

    void remove(int item) {
        const int count = key_[item];
        if (count < 0) return;
        if (prev_[item] >= 0) {
            next_[prev_[item]] = next_[item];
        } else {
            head_[static_cast<std::size_t>(count)] = next_[item];
        }
        if (next_[item] >= 0) prev_[next_[item]] = prev_[item];
        key_[item] = -1;
    }

    void move(int item, int count) {
        remove(item);
        insert(item, count);
    }

    int head(int count) const { return head_[static_cast<std::size_t>(count)]; }
    int next(int item) const { return next_[item]; }
    int max_count() const { return static_cast<int>(head_.size()) - 2; }

private:
    std::vector<int> head_;
    std::vector<int> next_;
    std::vector<int> prev_;
    std::vector<int> key_;
};

}  // namespace

std::vector<BasisFactor::Deficiency> BasisFactor::factorize(int m, const ColumnSource& column) {
    m_ = m;
    pivot_row_.clear();
    pivot_pos_.clear();
    pivot_value_.clear();
    l_start_.assign(1, 0);
    u_start_.assign(1, 0);
    l_index_.clear();
    l_value_.clear();
    u_index_.clear();
    u_value_.clear();
    etas_.clear();
    eta_index_.clear();
    eta_value_.clear();

    std::vector<std::vector<Entry>> cols(static_cast<std::size_t>(m));
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(m));
    std::vector<int> col_count(static_cast<std::size_t>(m), 0);
    std::vector<int> row_count(static_cast<std::size_t>(m), 0);
    std::vector<char> col_done(static_cast<std::size_t>(m), 0);
    std::vector<char> row_done(static_cast<std::size_t>(m), 0);

    std::vector<Entry> scratch;
    for (int p = 0; p < m; ++p) {
        scratch.clear();
        column(p, scratch);
        auto& col = cols[static_cast<std::size_t>(p)];
        for (const Entry& e : scratch) {
            if (std::abs(e.value) <= drop_tolerance) continue;
            col.push_back(e);
            rows[static_cast<std::size_t>(e.index)].push_back(p);
        }
        col_count[static_cast<std::size_t>(p)] = static_cast<int>(col.size());
    }
    for (int i = 0; i < m; ++i) row_count[static_cast<std::size_t>(i)] = static_cast<int>(rows[static_cast<std::size_t>(i)].size());

    CountBuckets col_buckets(m);
    CountBuckets row_buckets(m);
    for (int p = 0; p < m; ++p) col_buckets.insert(p, col_count[static_cast<std::size_t>(p)]);
    for (int i = 0; i < m; ++i) row_buckets.insert(i, row_count[static_cast<std::size_t>(i)]);

    std::vector<int> mark(static_cast<std::size_t>(m), -1);

    auto find_in_column = [&](int c, int r) -> int {
        const auto& col = cols[static_cast<std::size_t>(c)];
        for (std::size_t k = 0; k < col.size(); ++k) {
            if (col[k].index == r) return static_cast<int>(k);
        }
        return -1;
    };
    auto column_max = [&](int c) {
        double mx = 0.0;
        for (const Entry& e : cols[static_cast<std::size_t>(c)]) mx = std::max(mx, std::abs(e.value));
        return mx;
    };

    const double big = std::numeric_limits<double>::max();

    for (int step = 0; step < m; ++step) {
        int pr = -1;
        int pc = -1;
        double pv = 0.0;

        // Column singletons never create fill and need no threshold test.
        while (col_buckets.head(1) >= 0) {
            const int c = col_buckets.head(1);
            const Entry e = cols[static_cast<std::size_t>(c)].front();
            if (std::abs(e.value) > singular_tolerance) {
                pr = e.index;
                pc = c;
                pv = e.value;
                break;
            }
            cols[static_cast<std::size_t>(c)].clear();
            col_count[static_cast<std::size_t>(c)] = 0;
            col_buckets.move(c, 0);
            --row_count[static_cast<std::size_t>(e.index)];
            row_buckets.move(e.index, row_count[static_cast<std::size_t>(e.index)]);
        }

        if (pr < 0) {
            int tried = 0;
            for (int r = row_buckets.head(1); r >= 0 && tried < 8; r = row_buckets.next(r), ++tried) {
                for (int c : rows[static_cast<std::size_t>(r)]) {
                    if (col_done[static_cast<std::size_t>(c)]) continue;
                    const int k = find_in_column(c, r);
                    if (k < 0) continue;
                    const double v = cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)].value;
                    if (std::abs(v) > singular_tolerance && std::abs(v) >= pivot_threshold * column_max(c)) {
                        pr = r;
                        pc = c;
                        pv = v;
                    }
                    break;
                }
                if (pr >= 0) break;
            }
        }

        if (pr < 0) {
            double best_mc = big;
            double best_abs = 0.0;
            int searched = 0;
            for (int cnt = 1; cnt <= m; ++cnt) {
                for (int c = col_buckets.head(cnt); c >= 0; c = col_buckets.next(c)) {
                    const double cmax = column_max(c);
                    for (const Entry& e : cols[static_cast<std::size_t>(c)]) {
                        const double a = std::abs(e.value);
                        if (a <= singular_tolerance || a < pivot_threshold * cmax) continue;
                        const double mc = double(row_count[static_cast<std::size_t>(e.index)] - 1) * double(cnt - 1);
                        if (mc < best_mc || (mc == best_mc && a > best_abs)) {
                            best_mc = mc;
                            best_abs = a;
                            pr = e.index;
                            pc = c;
                            pv = e.value;
                        }
                    }
                    if (pr >= 0 && ++searched >= 4) break;
                }
                if (pr >= 0 && searched >= 4) break;
                for (int r = row_buckets.head(cnt); r >= 0; r = row_buckets.next(r)) {
                    for (int c : rows[static_cast<std::size_t>(r)]) {
                        if (col_done[static_cast<std::size_t>(c)]) continue;
                        const int k = find_in_column(c, r);
                        if (k < 0) continue;
                        const double v = cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)].value;
                        const double a = std::abs(v);
                        if (a <= singular_tolerance || a < pivot_threshold * column_max(c)) continue;
                        const double mc = double(cnt - 1) * double(col_count[static_cast<std::size_t>(c)] - 1);
                        if (mc < best_mc || (mc == best_mc && a > best_abs)) {
                            best_mc = mc;
                            best_abs = a;
                            pr = r;
                            pc = c;
                            pv = v;
                        }
                    }
                    if (pr >= 0 && ++searched >= 4) break;
                }
                if (pr >= 0 && (searched >= 4 || best_mc <= double(cnt - 1) * double(cnt - 1))) break;
            }
        }

        if (pr < 0) break;  // remaining active submatrix is numerically singular

        // Eliminate pivot column.
        pivot_row_.push_back(pr);
        pivot_pos_.push_back(pc);
        pivot_value_.push_back(pv);
        col_done[static_cast<std::size_t>(pc)] = 1;
        row_done[static_cast<std::size_t>(pr)] = 1;
        col_buckets.remove(pc);
        row_buckets.remove(pr);

        const std::size_t l_begin = l_index_.size();
        for (const Entry& e : cols[static_cast<std::size_t>(pc)]) {
            if (e.index == pr) continue;
            l_index_.push_back(e.index);
            l_value_.push_back(e.value / pv);
            --row_count[static_cast<std::size_t>(e.index)];
        }
        const std::size_t l_end = l_index_.size();
        cols[static_cast<std::size_t>(pc)].clear();
        cols[static_cast<std::size_t>(pc)].shrink_to_fit();

        // Pivot row goes to U; update the remaining columns it touches.
        for (int c : rows[static_cast<std::size_t>(pr)]) {
            if (col_done[static_cast<std::size_t>(c)]) continue;
            const int k = find_in_column(c, pr);
            if (k < 0) continue;
            auto& col = cols[static_cast<std::size_t>(c)];
            const double a = col[static_cast<std::size_t>(k)].value;
            col[static_cast<std::size_t>(k)] = col.back();
            col.pop_back();
            u_index_.push_back(c);
            u_value_.push_back(a);
            if (l_end > l_begin) {
                for (std::size_t q = 0; q < col.size(); ++q) mark[static_cast<std::size_t>(col[q].index)] = static_cast<int>(q);
                bool cancelled = false;
                for (std::size_t q = l_begin; q < l_end; ++q) {
                    const int i = l_index_[q];
                    const double delta = -l_value_[q] * a;
                    const int at = mark[static_cast<std::size_t>(i)];
                    if (at >= 0) {
                        double& v = col[static_cast<std::size_t>(at)].value;
                        v += delta;
                        if (std::abs(v) <= drop_tolerance) cancelled = true;
                    } else {
                        mark[static_cast<std::size_t>(i)] = static_cast<int>(col.size());
                        col.push_back({i, delta});
                        rows[static_cast<std::size_t>(i)].push_back(c);
                        ++row_count[static_cast<std::size_t>(i)];
                    }
                }
                for (const Entry& e : col) mark[static_cast<std::size_t>(e.index)] = -1;
                if (cancelled) {
                    std::size_t out = 0;
                    for (std::size_t q = 0; q < col.size(); ++q) {
                        if (std::abs(col[q].value) <= drop_tolerance) {
                            --row_count[static_cast<std::size_t>(col[q].index)];
                        } else {
                            col[out++] = col[q];
                        }
                    }
                    col.resize(out);
                }
            }
            col_count[static_cast<std::size_t>(c)] = static_cast<int>(col.size());
            col_buckets.move(c, col_count[static_cast<std::size_t>(c)]);
        }
        rows[static_cast<std::size_t>(pr)].clear();
        rows[static_cast<std::size_t>(pr)].shrink_to_fit();

        for (std::size_t q = l_begin; q < l_end; ++q) {
            const int i = l_index_[q];
            if (!row_done[static_cast<std::size_t>(i)]) row_buckets.move(i, row_count[static_cast<std::size_t>(i)]);
        }
        l_start_.push_back(l_index_.size());
        u_start_.push_back(u_index_.size());
    }

    std::vector<Deficiency> deficient;
    if (static_cast<int>(pivot_row_.size()) < m) {
        std::vector<int> free_rows;
        for (int i = 0; i < m; ++i) {
            if (!row_done[static_cast<std::size_t>(i)]) free_rows.push_back(i);
        }
        std::size_t next_row = 0;
        for (int p = 0; p < m; ++p) {
            if (!col_done[static_cast<std::size_t>(p)]) deficient.push_back({p, free_rows[next_row++]});
        }
    }
    return deficient;
}

void BasisFactor::ftran(std::vector<double>& rhs) const {
    const std::size_t steps = pivot_row_.size();
    for (std::size_t k = 0; k < steps; ++k) {
        const double y = rhs[static_cast<std::size_t>(pivot_row_[k])];
        if (y == 0.0) continue;
        for (std::size_t q = l_start_[k]; q < l_start_[k + 1]; ++q) {
            rhs[static_cast<std::size_t>(l_index_[q])] -= l_value_[q] * y;
        }
    }
    work_.assign(static_cast<std::size_t>(m_), 0.0);
    for (std::size_t k = steps; k-- > 0;) {
        double s = rhs[static_cast<std::size_t>(pivot_row_[k])];
        for (std::size_t q = u_start_[k]; q < u_start_[k + 1]; ++q) {
            s -= u_value_[q] * work_[static_cast<std::size_t>(u_index_[q])];
        }
        work_[static_cast<std::size_t>(pivot_pos_[k])] = s / pivot_value_[k];
    }
    for (const Eta& eta : etas_) {
        double& xp = work_[static_cast<std::size_t>(eta.position)];
        xp /= eta.pivot;
        const double v = xp;
        if (v == 0.0) continue;
        for (std::size_t q = eta.begin; q < eta.end; ++q) {
            work_[static_cast<std::size_t>(eta_index_[q])] -= eta_value_[q] * v;
        }
    }
    rhs.swap(work_);
}

void BasisFactor::btran(std::vector<double>& rhs) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        double s = rhs[static_cast<std::size_t>(it->position)];
        for (std::size_t q = it->begin; q < it->end; ++q) {
            s -= eta_value_[q] * rhs[static_cast<std::size_t>(eta_index_[q])];
        }
        rhs[static_cast<std::size_t>(it->position)] = s / it->pivot;
    }
    const std::size_t steps = pivot_row_.size();
    work_.assign(static_cast<std::size_t>(m_), 0.0);
    for (std::size_t k = 0; k < steps; ++k) {
        const double v = rhs[static_cast<std::size_t>(pivot_pos_[k])] / pivot_value_[k];
        work_[static_cast<std::size_t>(pivot_row_[k])] = v;
        if (v == 0.0) continue;
        for (std::size_t q = u_start_[k]; q < u_start_[k + 1]; ++q) {
            rhs[static_cast<std::size_t>(u_index_[q])] -= u_value_[q] * v;
        }
    }
    for (std::size_t k = steps; k-- > 0;) {
        double s = 0.0;
        for (std::size_t q = l_start_[k]; q < l_start_[k + 1]; ++q) {
            s += l_value_[q] * work_[static_cast<std::size_t>(l_index_[q])];
        }
        work_[static_cast<std::size_t>(pivot_row_[k])] -= s;
    }
    rhs.swap(work_);
}

void BasisFactor::update(int position, std::span<const double> alpha) {
    Eta eta{position, alpha[static_cast<std::size_t>(position)], eta_index_.size(), 0};
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (static_cast<int>(i) == position) continue;
        if (std::abs(alpha[i]) > drop_tolerance) {
            eta_index_.push_back(static_cast<int>(i));
            eta_value_.push_back(alpha[i]);
        }
    }
    eta.end = eta_index_.size();
    etas_.push_back(eta);
}

}  // namespace gridplan
