from django.contrib import admin
from .models import GraphInstance, ScanRow


@admin.register(GraphInstance)
class GraphInstanceAdmin(admin.ModelAdmin):
    list_display = ['family', 'n', 's', 'delta_u', 'delta_v', 'created_at']
    list_filter = ['family', 's', 'created_at']
    search_fields = ['family', 'identity']
    readonly_fields = ['created_at']
    ordering = ['-created_at']
    date_hierarchy = 'created_at'

    fieldsets = (
        ('Instance', {
            'fields': ('family', 'parameters', 'n', 's')
        }),
        ('Degrees', {
            'fields': ('delta_u', 'delta_v', 'identity')
        }),
        ('Graph', {
            'fields': ('graph_text', 'created_at'),
            'classes': ('collapse',)
        }),
    )


@admin.register(ScanRow)
class ScanRowAdmin(admin.ModelAdmin):
    list_display = ['label', 'family', 'n', 's', 'delta_sum', 'delta_gap', 'verdict', 'nodes_explored', 'wall_time']
    list_filter = ['verdict', 'family', 's']
    search_fields = ['label', 'family', 'note']
    readonly_fields = ['created_at']
    ordering = ['-created_at']

    fieldsets = (
        ('Instance', {
            'fields': ('label', 'family', 'parameters', 'n', 's')
        }),
        ('Degrees', {
            'fields': ('delta_u', 'delta_v', 'delta_sum', 'delta_gap')
        }),
        ('Outcome', {
            'fields': ('verdict', 'nodes_explored', 'wall_time', 'note', 'created_at')
        }),
    )
