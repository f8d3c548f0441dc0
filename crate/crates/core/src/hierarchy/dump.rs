use super::{format_r_entry, r_entries, FlowTable, OmegaTable, ThetaTable};

pub fn dump_theta(t: &ThetaTable) -> String {
    let mut out = String::new();
    for p in 0..=t.order {
        for a in 0..t.n {
            out.push_str(&format!("theta[{},{}] = {}\n", a + 1, p, t.theta(a, p)));
        }
    }
    out
}

pub fn dump_r(t: &ThetaTable) -> String {
    let entries = r_entries(t);
    if entries.is_empty() {
        return "R = 0\n".to_string();
    }
    entries
        .iter()
        .map(|(k, e, a, x)| format_r_entry(*k, *e, *a, x) + "\n")
        .collect()
}

pub fn dump_omega(o: &OmegaTable) -> String {
    o.entries()
        .map(|(a, p, b, q, x)| format!("omega[{},{};{},{}] = {}\n", a + 1, p, b + 1, q, x))
        .collect()
}

pub fn dump_flows(f: &FlowTable) -> String {
    let mut out = String::new();
    for b in 0..f.n {
        for q in 0..=f.max_q {
            for a in 0..f.n {
                out.push_str(&format!(
                    "flow[{};{},{}] = {}\n",
                    a + 1,
                    b + 1,
                    q,
                    f.rhs[b][q][a]
                ));
            }
        }
    }
    out
}
