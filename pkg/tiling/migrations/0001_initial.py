# Generated by Django 4.2.7 on 2026-10-18 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='GraphInstance',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('family', models.CharField(choices=[('p_graph', 'P(m,p) circulant'), ('zhao', 'Zhao gadget'), ('unbalanced_even', 'Unbalanced gadget (even)'), ('unbalanced_odd', 'Unbalanced gadget (odd)'), ('sqrt_gadget', 'Square-root gadget'), ('random_lower', 'Random lower-bound gadget'), ('random_bigraph', 'Random bigraph'), ('planted_extremal', 'Planted extremal'), ('uploaded', 'Uploaded')], max_length=30)),
                ('parameters', models.JSONField(default=dict, help_text='Generator parameters')),
                ('n', models.IntegerField(help_text='Vertices per side')),
                ('s', models.IntegerField(help_text='Tile size')),
                ('delta_u', models.IntegerField()),
                ('delta_v', models.IntegerField()),
                ('identity', models.CharField(blank=True, help_text='Degree identity asserted by the generator', max_length=255)),
                ('graph_text', models.TextField(help_text='Graph in bigraph text format')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='ScanRow',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('label', models.CharField(blank=True, help_text='Scan label from the grid spec', max_length=100)),
                ('family', models.CharField(max_length=30)),
                ('s', models.IntegerField()),
                ('n', models.IntegerField()),
                ('parameters', models.JSONField(default=dict)),
                ('delta_u', models.IntegerField(blank=True, null=True)),
                ('delta_v', models.IntegerField(blank=True, null=True)),
                ('delta_sum', models.IntegerField(blank=True, null=True)),
                ('delta_gap', models.IntegerField(blank=True, help_text='δ_V − δ_U', null=True)),
                ('verdict', models.CharField(choices=[('tiled', 'Tiled'), ('absent', 'Absent'), ('refuted', 'Refuted'), ('unknown', 'Unknown'), ('error', 'Error')], max_length=10)),
                ('nodes_explored', models.BigIntegerField(default=0)),
                ('wall_time', models.FloatField(default=0.0, help_text='Seconds')),
                ('note', models.TextField(blank=True)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at', 'id'],
            },
        ),
    ]
