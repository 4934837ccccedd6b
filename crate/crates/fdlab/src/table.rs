use fdlab_core::thresholds::ThresholdTable;

pub const HEADER: &str = "n,k,p,num,den,parenthetical";

pub fn table_csv(t: &ThresholdTable) -> String {
    let mut s = String::from(HEADER);
    s.push('\n');
    for row in &t.rows {
        for (i, v) in row.values.iter().enumerate() {
            let k = i as u32 + 1;
            s.push_str(&format!("{},{},{},{},{},{}\n", row.n, k, v, v.num(), v.den(), ThresholdTable::is_parenthetical(row.n, k)));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use fdlab_core::thresholds::fig1_table;

    #[test]
    fn smallest_table() {
        let csv = table_csv(&fig1_table(3).unwrap());
        assert_eq!(csv, "n,k,p,num,den,parenthetical\n3,1,1/2,1,2,false\n3,2,1/2,1,2,true\n");
    }
}
