//! IoU and acc@m over grounding items, with per-salience-category tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::BBox;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SalienceCategory {
    SalientCreature,
    SalientObject,
    Inconspicuous,
}

impl SalienceCategory {
    pub fn is_salient(self) -> bool {
        !matches!(self, SalienceCategory::Inconspicuous)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundingItem {
    pub expression: String,
    pub predicted: BBox,
    pub reference: BBox,
    pub category: SalienceCategory,
}

impl GroundingItem {
    pub fn iou(&self) -> f64 {
        iou(&self.predicted, &self.reference)
    }
}

/// Intersection over union; 0 when the union has no area.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let w = (a.x_max().min(b.x_max()) - a.x_min().max(b.x_min())).max(0.0);
    let h = (a.y_max().min(b.y_max()) - a.y_min().max(b.y_min())).max(0.0);
    let inter = w * h;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdRule {
    /// IoU must exceed the threshold.
    #[default]
    Strict,
    /// IoU may equal the threshold.
    Inclusive,
}

impl ThresholdRule {
    pub fn passes(self, iou: f64, m: f64) -> bool {
        match self {
            ThresholdRule::Strict => iou > m,
            ThresholdRule::Inclusive => iou >= m,
        }
    }
}

fn check_threshold(m: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::validation("m", format!("threshold {m} outside [0, 1]")));
    }
    Ok(())
}

/// Percentage of IoU values passing the threshold.
pub fn acc_at_ious(ious: &[f64], m: f64, rule: ThresholdRule) -> Result<f64> {
    check_threshold(m)?;
    if ious.is_empty() {
        return Err(Error::EmptyCorpus("no grounding items".into()));
    }
    let hits = ious.iter().filter(|&&v| rule.passes(v, m)).count();
    Ok(100.0 * hits as f64 / ious.len() as f64)
}

pub fn acc_at(items: &[GroundingItem], m: f64) -> Result<f64> {
    acc_at_with(items, m, ThresholdRule::Strict)
}

pub fn acc_at_with(items: &[GroundingItem], m: f64, rule: ThresholdRule) -> Result<f64> {
    let ious: Vec<f64> = items.iter().map(GroundingItem::iou).collect();
    acc_at_ious(&ious, m, rule)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ReportGroup {
    #[serde(rename = "All")]
    All,
    #[serde(rename = "Salient")]
    Salient,
    #[serde(rename = "Salient Creatures")]
    SalientCreatures,
    #[serde(rename = "Salient Objects")]
    SalientObjects,
    #[serde(rename = "Inconspicuous")]
    Inconspicuous,
}

impl ReportGroup {
    pub const ALL: [ReportGroup; 5] = [
        ReportGroup::All,
        ReportGroup::Salient,
        ReportGroup::SalientCreatures,
        ReportGroup::SalientObjects,
        ReportGroup::Inconspicuous,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ReportGroup::All => "All",
            ReportGroup::Salient => "Salient",
            ReportGroup::SalientCreatures => "Salient Creatures",
            ReportGroup::SalientObjects => "Salient Objects",
            ReportGroup::Inconspicuous => "Inconspicuous",
        }
    }

    pub fn contains(self, c: SalienceCategory) -> bool {
        match self {
            ReportGroup::All => true,
            ReportGroup::Salient => c.is_salient(),
            ReportGroup::SalientCreatures => c == SalienceCategory::SalientCreature,
            ReportGroup::SalientObjects => c == SalienceCategory::SalientObject,
            ReportGroup::Inconspicuous => c == SalienceCategory::Inconspicuous,
        }
    }
}

/// One table row; `None` entries mean the group had no items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupScore {
    pub group: ReportGroup,
    pub n_items: usize,
    pub acc: Option<f64>,
    pub mean_iou: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundingReport {
    pub threshold: f64,
    pub rule: ThresholdRule,
    pub rows: Vec<GroupScore>,
}

impl GroundingReport {
    pub fn row(&self, group: ReportGroup) -> &GroupScore {
        self.rows
            .iter()
            .find(|r| r.group == group)
            .expect("every group has a row")
    }
}

pub fn category_report(items: &[GroundingItem]) -> Result<GroundingReport> {
    category_report_with(items, 0.5, ThresholdRule::Strict)
}

pub fn category_report_with(
    items: &[GroundingItem],
    m: f64,
    rule: ThresholdRule,
) -> Result<GroundingReport> {
    check_threshold(m)?;
    if items.is_empty() {
        return Err(Error::EmptyCorpus("no grounding items".into()));
    }
    let ious: Vec<(SalienceCategory, f64)> = items.iter().map(|i| (i.category, i.iou())).collect();
    let rows = ReportGroup::ALL
        .iter()
        .map(|&group| {
            let vals: Vec<f64> = ious
                .iter()
                .filter(|(c, _)| group.contains(*c))
                .map(|(_, v)| *v)
                .collect();
            let (acc, mean_iou) = if vals.is_empty() {
                (None, None)
            } else {
                let acc = acc_at_ious(&vals, m, rule).ok();
                (acc, Some(vals.iter().sum::<f64>() / vals.len() as f64))
            };
            GroupScore {
                group,
                n_items: vals.len(),
                acc,
                mean_iou,
            }
        })
        .collect();
    Ok(GroundingReport {
        threshold: m,
        rule,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x0: f64, y0: f64, x1: f64, y1: f64) -> BBox {
        BBox::new(x0, y0, x1, y1).unwrap()
    }

    fn item(iou_target: f64, category: SalienceCategory) -> GroundingItem {
        // reference [0,1]², prediction [0,w]×[0,1] has IoU w for w ≤ 1
        GroundingItem {
            expression: String::new(),
            predicted: b(0.0, 0.0, iou_target, 1.0),
            reference: b(0.0, 0.0, 1.0, 1.0),
            category,
        }
    }

    #[test]
    fn iou_examples() {
        let a = b(0.0, 0.0, 2.0, 2.0);
        assert_eq!(iou(&a, &a), 1.0);
        assert_eq!(iou(&a, &b(5.0, 5.0, 6.0, 6.0)), 0.0);
        assert!((iou(&a, &b(1.0, 1.0, 3.0, 3.0)) - 1.0 / 7.0).abs() < 1e-12);
        let point = b(1.0, 1.0, 1.0, 1.0);
        assert_eq!(iou(&point, &point), 0.0);
    }

    #[test]
    fn acc_strict_at_threshold() {
        let items = vec![item(0.5, SalienceCategory::SalientObject)];
        assert_eq!(acc_at(&items, 0.5).unwrap(), 0.0);
        assert_eq!(acc_at_with(&items, 0.5, ThresholdRule::Inclusive).unwrap(), 100.0);
        let items = vec![
            item(0.6, SalienceCategory::SalientObject),
            item(0.4, SalienceCategory::SalientObject),
        ];
        assert!((acc_at(&items, 0.5).unwrap() - 50.0).abs() < 1e-12);
        assert!(matches!(acc_at(&[], 0.5), Err(Error::EmptyCorpus(_))));
        assert!(acc_at(&items, 1.5).is_err());
    }

    #[test]
    fn report_groups() {
        let items = vec![
            item(0.6, SalienceCategory::SalientCreature),
            item(0.4, SalienceCategory::SalientObject),
        ];
        let rep = category_report(&items).unwrap();
        let salient = rep.row(ReportGroup::Salient);
        assert!((salient.acc.unwrap() - 50.0).abs() < 1e-12);
        assert!((salient.mean_iou.unwrap() - 0.5).abs() < 1e-12);
        let inc = rep.row(ReportGroup::Inconspicuous);
        assert_eq!((inc.acc, inc.mean_iou, inc.n_items), (None, None, 0));
    }

    #[test]
    fn report_all_perfect_creatures() {
        let items = vec![item(1.0, SalienceCategory::SalientCreature); 3];
        let rep = category_report(&items).unwrap();
        for g in [ReportGroup::All, ReportGroup::Salient, ReportGroup::SalientCreatures] {
            assert_eq!(rep.row(g).acc, Some(100.0));
            assert_eq!(rep.row(g).mean_iou, Some(1.0));
        }
        assert_eq!(rep.row(ReportGroup::SalientObjects).acc, None);
        assert_eq!(rep.row(ReportGroup::Inconspicuous).acc, None);
    }
}
