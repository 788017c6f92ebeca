import json

from django.db import models

from .utils.bigraph import min_degrees


class GraphInstance(models.Model):
    FAMILY_CHOICES = [
        ('p_graph', 'P(m,p) circulant'),
        ('zhao', 'Zhao gadget'),
        ('unbalanced_even', 'Unbalanced gadget (even)'),
        ('unbalanced_odd', 'Unbalanced gadget (odd)'),
        ('sqrt_gadget', 'Square-root gadget'),
        ('random_lower', 'Random lower-bound gadget'),
        ('random_bigraph', 'Random bigraph'),
        ('planted_extremal', 'Planted extremal'),
        ('uploaded', 'Uploaded'),
    ]

    family = models.CharField(max_length=30, choices=FAMILY_CHOICES)
    parameters = models.JSONField(default=dict, help_text="Generator parameters")
    n = models.IntegerField(help_text="Vertices per side")
    s = models.IntegerField(help_text="Tile size")
    delta_u = models.IntegerField()
    delta_v = models.IntegerField()
    identity = models.CharField(max_length=255, blank=True, help_text="Degree identity asserted by the generator")
    graph_text = models.TextField(help_text="Graph in bigraph text format")
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return f"{self.family} n={self.n} s={self.s}"

    @property
    def delta_sum(self):
        return self.delta_u + self.delta_v

    @classmethod
    def from_construction(cls, construction):
        profile = min_degrees(construction.graph, construction.s)
        return cls.objects.create(
            family=construction.family,
            parameters=construction.spec.params,
            n=construction.graph.n,
            s=construction.s,
            delta_u=profile.delta_u,
            delta_v=profile.delta_v,
            identity=construction.identity,
            graph_text=construction.to_text(),
        )


class ScanRow(models.Model):
    VERDICT_CHOICES = [
        ('tiled', 'Tiled'),
        ('absent', 'Absent'),
        ('refuted', 'Refuted'),
        ('unknown', 'Unknown'),
        ('error', 'Error'),
    ]

    label = models.CharField(max_length=100, blank=True, help_text="Scan label from the grid spec")
    family = models.CharField(max_length=30)
    s = models.IntegerField()
    n = models.IntegerField()
    parameters = models.JSONField(default=dict)
    delta_u = models.IntegerField(null=True, blank=True)
    delta_v = models.IntegerField(null=True, blank=True)
    delta_sum = models.IntegerField(null=True, blank=True)
    delta_gap = models.IntegerField(null=True, blank=True, help_text="δ_V − δ_U")
    verdict = models.CharField(max_length=10, choices=VERDICT_CHOICES)
    nodes_explored = models.BigIntegerField(default=0)
    wall_time = models.FloatField(default=0.0, help_text="Seconds")
    note = models.TextField(blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at', 'id']

    def __str__(self):
        return f"{self.family} n={self.n} s={self.s}: {self.verdict}"

    @classmethod
    def from_result(cls, result, label=''):
        """Persist one scan harness result row."""
        return cls.objects.create(
            label=label,
            family=result.family,
            s=result.s,
            n=result.n,
            parameters=json.loads(result.params),
            delta_u=result.delta_u,
            delta_v=result.delta_v,
            delta_sum=result.delta_sum,
            delta_gap=result.delta_gap,
            verdict=result.verdict,
            nodes_explored=result.nodes_explored,
            wall_time=result.wall_time,
            note=result.note,
        )
